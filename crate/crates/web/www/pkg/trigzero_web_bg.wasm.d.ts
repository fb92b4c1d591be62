/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_curve_free: (a: number, b: number) => void;
export const __wbg_measure_free: (a: number, b: number) => void;
export const curve_marks: (a: number) => [number, number];
export const curve_x: (a: number) => [number, number];
export const curve_y: (a: number) => [number, number];
export const integrandProfile: (a: number, b: number, c: number) => [number, number, number];
export const measure_new: (a: number, b: number, c: number, d: number) => [number, number, number];
export const measure_predictedLimit: (a: number) => number;
export const measure_psi: (a: number, b: number) => number;
export const samplePath: (a: number, b: number, c: number, d: number) => [number, number, number];
export const zeroRatioSweep: (a: number, b: number, c: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
