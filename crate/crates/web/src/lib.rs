//! Browser bindings for trigzero.
//!
//! Three operations back the demo page: the Kac–Rice integrand of a
//! measure at one degree, the expected zero ratio over a range of degrees
//! against its predicted limit, and one sampled polynomial with its zeros.
//! The numerics live in plain functions so they are testable natively; the
//! exported wrappers only translate errors.

use std::f64::consts::PI;

use trigzero::kacrice::{expected_zero_ratio, integrand_profile, predicted_limit};
use trigzero::sampler::CoefficientSampler;
use trigzero::spectral::{Atom, DensitySpec};
use trigzero::zeros::{count_zeros_with, evaluate_grid, CountOptions};
use trigzero::{Error, SpectralMeasure};
use wasm_bindgen::prelude::*;

/// Degrees above this make covariance factorization too slow for a page.
pub const MAX_SAMPLE_DEGREE: usize = 1024;

/// Builds a measure from a kind name and up to two parameters. `atomic`
/// is a single atom at `p`; the density kinds read `p` (and `q` for
/// `annulus`, as the inner radius).
pub fn build_measure(kind: &str, p: f64, q: f64) -> Result<SpectralMeasure, Error> {
    let density = match kind {
        "atomic" => return SpectralMeasure::new(vec![Atom::new(p, 1.0)?], None),
        "uniform" | "independent" => DensitySpec::uniform(),
        "box" => DensitySpec::box_density(p)?,
        "annulus" => DensitySpec::annulus(q, p)?,
        "poisson" => DensitySpec::poisson(p)?,
        "constant_corr" => DensitySpec::constant_corr(p)?,
        "raised_cosine_squared" => DensitySpec::raised_cosine_squared(),
        other => return Err(Error::InvalidArgument(format!("unknown measure kind '{other}'"))),
    };
    SpectralMeasure::from_density(density)
}

/// Limit of `E[N]/n`, NaN when none exists.
pub fn limit_of(measure: &SpectralMeasure) -> f64 {
    predicted_limit(measure.density()).limit.unwrap_or(f64::NAN)
}

/// `(x, integrand)` pairs at `points` midpoints (a power of two).
pub fn integrand(measure: &SpectralMeasure, n: usize, points: usize) -> Result<(Vec<f64>, Vec<f64>), Error> {
    let rho = measure.correlation(n)?;
    Ok(integrand_profile(&rho, n, points)?.into_iter().unzip())
}

/// `E[N(f_n, [0, 2π))]/n` for each degree.
pub fn sweep(measure: &SpectralMeasure, degrees: &[usize]) -> Result<Vec<f64>, Error> {
    let max = degrees.iter().copied().max().unwrap_or(1).max(1);
    let rho = measure.correlation(max)?;
    degrees
        .iter()
        .map(|&n| expected_zero_ratio(&rho, n, 0.0, 2.0 * PI).map(|p| p.ratio))
        .collect()
}

/// One sampled path on `points` grid nodes together with its zeros.
pub struct Path {
    pub x: Vec<f64>,
    pub values: Vec<f64>,
    pub roots: Vec<f64>,
}

pub fn sample_path(measure: &SpectralMeasure, n: usize, seed: u64, points: usize) -> Result<Path, Error> {
    if n > MAX_SAMPLE_DEGREE {
        return Err(Error::InvalidArgument(format!(
            "degree {n} exceeds {MAX_SAMPLE_DEGREE}"
        )));
    }
    let sample = CoefficientSampler::new(measure, n)?.sample(seed, 0);
    let values = evaluate_grid(&sample, points)?;
    let x = (0..points).map(|j| 2.0 * PI * j as f64 / points as f64).collect();
    let options = CountOptions { retain_roots: true };
    let count = count_zeros_with(&sample, 0.0, 2.0 * PI, options)?;
    Ok(Path {
        x,
        values,
        roots: count.roots.unwrap_or_default(),
    })
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
pub struct Measure(SpectralMeasure);

#[wasm_bindgen]
impl Measure {
    #[wasm_bindgen(constructor)]
    pub fn new(kind: &str, p: f64, q: f64) -> Result<Measure, JsError> {
        build_measure(kind, p, q).map(Measure).map_err(js)
    }

    /// Predicted limit of the zero ratio; NaN for atomic measures.
    #[wasm_bindgen(js_name = predictedLimit)]
    pub fn predicted_limit(&self) -> f64 {
        limit_of(&self.0)
    }

    /// Density value `ψ(x)`, for drawing the measure.
    pub fn psi(&self, x: f64) -> f64 {
        self.0.psi(x)
    }
}

#[wasm_bindgen]
pub struct Curve {
    x: Vec<f64>,
    y: Vec<f64>,
    marks: Vec<f64>,
}

#[wasm_bindgen]
impl Curve {
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn y(&self) -> Vec<f64> {
        self.y.clone()
    }

    /// Zeros of a sampled path; empty otherwise.
    #[wasm_bindgen(getter)]
    pub fn marks(&self) -> Vec<f64> {
        self.marks.clone()
    }
}

#[wasm_bindgen(js_name = integrandProfile)]
pub fn integrand_js(measure: &Measure, n: usize, points: usize) -> Result<Curve, JsError> {
    let (x, y) = integrand(&measure.0, n, points).map_err(js)?;
    Ok(Curve {
        x,
        y,
        marks: Vec::new(),
    })
}

#[wasm_bindgen(js_name = zeroRatioSweep)]
pub fn sweep_js(measure: &Measure, degrees: Vec<usize>) -> Result<Curve, JsError> {
    let y = sweep(&measure.0, &degrees).map_err(js)?;
    let x = degrees.iter().map(|&n| n as f64).collect();
    Ok(Curve {
        x,
        y,
        marks: Vec::new(),
    })
}

#[wasm_bindgen(js_name = samplePath)]
pub fn sample_path_js(measure: &Measure, n: usize, seed: u32, points: usize) -> Result<Curve, JsError> {
    let p = sample_path(&measure.0, n, seed.into(), points).map_err(js)?;
    Ok(Curve {
        x: p.x,
        y: p.values,
        marks: p.roots,
    })
}
