/* tslint:disable */
/* eslint-disable */

export class Curve {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Zeros of a sampled path; empty otherwise.
     */
    readonly marks: Float64Array;
    readonly x: Float64Array;
    readonly y: Float64Array;
}

export class Measure {
    free(): void;
    [Symbol.dispose](): void;
    constructor(kind: string, p: number, q: number);
    /**
     * Predicted limit of the zero ratio; NaN for atomic measures.
     */
    predictedLimit(): number;
    /**
     * Density value `ψ(x)`, for drawing the measure.
     */
    psi(x: number): number;
}

export function integrandProfile(measure: Measure, n: number, points: number): Curve;

export function samplePath(measure: Measure, n: number, seed: number, points: number): Curve;

export function zeroRatioSweep(measure: Measure, degrees: Uint32Array): Curve;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_curve_free: (a: number, b: number) => void;
    readonly __wbg_measure_free: (a: number, b: number) => void;
    readonly curve_marks: (a: number) => [number, number];
    readonly curve_x: (a: number) => [number, number];
    readonly curve_y: (a: number) => [number, number];
    readonly integrandProfile: (a: number, b: number, c: number) => [number, number, number];
    readonly measure_new: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly measure_predictedLimit: (a: number) => number;
    readonly measure_psi: (a: number, b: number) => number;
    readonly samplePath: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly zeroRatioSweep: (a: number, b: number, c: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
