//! Fejér-type kernels and their convolutions with a spectral measure.
//!
//! Every convolution against the measure is a finite Fourier sum in the
//! correlation coefficients:
//!
//! * `s0(x) = E[f_n(x)²]  = Σ_{|r|<=n} (1 - |r|/n) ρ(r) e^{irx}`
//! * `s1(x) = E[f_n f_n'] = -Σ_{r=1}^{n} r (1 - r/n) ρ(r) sin(rx)`
//! * `s2(x) = E[f_n'(x)²] = c_0 + 2 Σ_{r=1}^{n-1} c_r ρ(r) cos(rx)`
//!
//! with `c_r = (1/n) Σ_{k=1}^{n-r} k (r + k)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fourier::{cosine_series_at, cosine_series_on_grid, next_pow2, sine_series_at, sine_series_on_grid};
use crate::quad::AdaptiveSimpson;
use crate::spectral::{CorrelationSequence, SpectralMeasure};

/// Below this `|sin(x/2)|` the closed forms switch to Fourier sums.
pub const SINGULARITY_GUARD: f64 = 1e-8;
/// Degrees up to which [`two_point_cov`] uses the plain double sum.
pub const DOUBLE_SUM_MAX_N: usize = 128;

/// `α_n = 6 / ((n+1)(2n+1))`.
pub fn alpha_n(n: usize) -> f64 {
    let n = n as f64;
    6.0 / ((n + 1.0) * (2.0 * n + 1.0))
}

/// Default grid size `max(4096, next_pow2(32 n))`.
pub fn default_grid_size(n: usize) -> usize {
    4096.max(next_pow2(32 * n))
}

fn fejer_coefficients(n: usize) -> Vec<f64> {
    (0..=n).map(|r| 1.0 - r as f64 / n as f64).collect()
}

/// `K_n(x) = (1/n) (sin(nx/2) / sin(x/2))²`.
pub fn fejer_eval(n: usize, x: f64) -> f64 {
    assert!(n >= 1, "degree must be positive");
    let s = (0.5 * x).sin();
    if s.abs() < SINGULARITY_GUARD {
        return cosine_series_at(&fejer_coefficients(n), x);
    }
    let q = (0.5 * n as f64 * x).sin() / s;
    q * q / n as f64
}

/// `L_n(x) = (α_n / n) |Σ_{k=0}^{n} k e^{ikx}|²`.
pub fn ln_eval(n: usize, x: f64) -> f64 {
    assert!(n >= 1, "degree must be positive");
    let nf = n as f64;
    if (0.5 * x).sin().abs() < SINGULARITY_GUARD {
        return alpha_n(n) * nf * (nf + 1.0) * (nf + 1.0) / 4.0;
    }
    let z: Vec<Complex64> = (0..=n).map(|k| Complex64::new(k as f64, 0.0)).collect();
    alpha_n(n) / nf * crate::fourier::complex_series_at(&z, x).norm_sqr()
}

/// `K_n'(x) = (2/n) S(x) S'(x)` with `S = sin(nx/2) / sin(x/2)`.
pub fn fejer_prime_eval(n: usize, x: f64) -> f64 {
    assert!(n >= 1, "degree must be positive");
    let nf = n as f64;
    let s = (0.5 * x).sin();
    if s.abs() < SINGULARITY_GUARD {
        let d: Vec<f64> = (0..=n).map(|r| -2.0 * r as f64 * (1.0 - r as f64 / nf)).collect();
        return sine_series_at(&d, x);
    }
    let c = (0.5 * x).cos();
    let (sn, cn) = (0.5 * nf * x).sin_cos();
    let big_s = sn / s;
    let big_s_prime = (0.5 * nf * cn * s - 0.5 * sn * c) / (s * s);
    2.0 / nf * big_s * big_s_prime
}

/// Dirichlet-type factor `D(θ) = sin(nθ/2) / sin(θ/2)` of the polarized
/// Fejér kernel `(1/n) D(x) D(y)`.
pub fn dirichlet_eval(n: usize, theta: f64) -> f64 {
    let s = (0.5 * theta).sin();
    if s.abs() < SINGULARITY_GUARD {
        let center = 0.5 * (n as f64 - 1.0);
        return (0..n).map(|k| ((k as f64 - center) * theta).cos()).sum();
    }
    (0.5 * n as f64 * theta).sin() / s
}

/// Fourier coefficients of the three kernels at degree `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelCoefficients {
    pub n: usize,
    /// `1 - r/n` for `r = 0..=n`.
    pub fejer: Vec<f64>,
    /// `c_r = (1/n) Σ_{k=1}^{n-r} k (r + k)` for `r = 0..n`.
    pub ln_scaled: Vec<f64>,
    /// `r (1 - r/n)` for `r = 0..=n`; entry 0 is 0.
    pub fejer_prime: Vec<f64>,
    pub alpha_n: f64,
}

impl KernelCoefficients {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "degree must be positive");
        let nf = n as f64;
        let ln_scaled = (0..n)
            .map(|r| {
                let m = (n - r) as f64;
                let s1 = m * (m + 1.0) / 2.0;
                let s2 = m * (m + 1.0) * (2.0 * m + 1.0) / 6.0;
                (r as f64 * s1 + s2) / nf
            })
            .collect();
        let fejer_prime = (0..=n).map(|r| r as f64 * (1.0 - r as f64 / nf)).collect();
        Self {
            n,
            fejer: fejer_coefficients(n),
            ln_scaled,
            fejer_prime,
            alpha_n: alpha_n(n),
        }
    }

    fn weighted(&self, rho: &CorrelationSequence) -> Result<[Vec<f64>; 3]> {
        rho.require_lag(self.n)?;
        let r = rho.values();
        let c0 = self.fejer.iter().zip(r).map(|(w, p)| w * p).collect();
        let c1 = self.fejer_prime.iter().zip(r).map(|(w, p)| -w * p).collect();
        let c2 = self.ln_scaled.iter().zip(r).map(|(w, p)| w * p).collect();
        Ok([c0, c1, c2])
    }
}

/// `s0, s1, s2` on the grid `x_j = offset + j 2π/m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionProfile {
    pub n: usize,
    pub m: usize,
    pub offset: f64,
    pub s0: Vec<f64>,
    pub s1: Vec<f64>,
    pub s2: Vec<f64>,
}

impl ConvolutionProfile {
    pub fn x(&self, j: usize) -> f64 {
        self.offset + j as f64 * 2.0 * PI / self.m as f64
    }
}

pub fn convolution_profile(rho: &CorrelationSequence, n: usize, m: usize) -> Result<ConvolutionProfile> {
    convolution_profile_with_offset(rho, n, m, 0.0)
}

/// Same as [`convolution_profile`] on a grid shifted by `offset`
/// (`offset = π/m` gives cell midpoints).
pub fn convolution_profile_with_offset(
    rho: &CorrelationSequence,
    n: usize,
    m: usize,
    offset: f64,
) -> Result<ConvolutionProfile> {
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    if !m.is_power_of_two() || m < 2 * n + 2 {
        return Err(Error::InvalidArgument(format!(
            "grid size {m} must be a power of two and at least 2n + 2 = {}",
            2 * n + 2
        )));
    }
    let [c0, c1, c2] = KernelCoefficients::new(n).weighted(rho)?;
    Ok(ConvolutionProfile {
        n,
        m,
        offset,
        s0: cosine_series_on_grid(&c0, m, offset),
        s1: sine_series_on_grid(&c1, m, offset),
        s2: cosine_series_on_grid(&c2, m, offset),
    })
}

/// `(s0, s1, s2)` at one point by direct `O(n)` summation.
pub fn moments_at(rho: &CorrelationSequence, n: usize, x: f64) -> Result<(f64, f64, f64)> {
    let [c0, c1, c2] = KernelCoefficients::new(n).weighted(rho)?;
    Ok((
        cosine_series_at(&c0, x),
        sine_series_at(&c1, x),
        cosine_series_at(&c2, x),
    ))
}

/// Precomputed kernel weights for repeated point evaluation.
#[derive(Debug, Clone)]
pub struct MomentEvaluator {
    c0: Vec<f64>,
    c1: Vec<f64>,
    c2: Vec<f64>,
}

impl MomentEvaluator {
    pub fn new(rho: &CorrelationSequence, n: usize) -> Result<Self> {
        let [c0, c1, c2] = KernelCoefficients::new(n).weighted(rho)?;
        Ok(Self { c0, c1, c2 })
    }

    pub fn at(&self, x: f64) -> (f64, f64, f64) {
        (
            cosine_series_at(&self.c0, x),
            sine_series_at(&self.c1, x),
            cosine_series_at(&self.c2, x),
        )
    }
}

/// Lower bound `(1/2n)(1 - ρ(n) cos(nx))` on `s0(x)`.
pub fn s0_lower_bound(rho: &CorrelationSequence, n: usize, x: f64) -> f64 {
    (1.0 - rho.at(n as i64) * (n as f64 * x).cos()) / (2.0 * n as f64)
}

/// `E[f_n(x) f_n(y)] = (1/n) Σ_{k,l=1}^{n} ρ(k-l) cos(kx - ly)`, by the
/// double sum for `n <= 128` and by the exact lag sum otherwise.
pub fn two_point_cov(rho: &CorrelationSequence, n: usize, x: f64, y: f64) -> Result<f64> {
    rho.require_lag(n)?;
    if n <= DOUBLE_SUM_MAX_N {
        Ok(two_point_cov_double_sum(rho, n, x, y))
    } else {
        Ok(two_point_cov_lag_sum(rho, n, x, y))
    }
}

pub fn two_point_cov_double_sum(rho: &CorrelationSequence, n: usize, x: f64, y: f64) -> f64 {
    let mut total = 0.0;
    for k in 1..=n {
        let kx = k as f64 * x;
        for l in 1..=n {
            total += rho.at(k as i64 - l as i64) * (kx - l as f64 * y).cos();
        }
    }
    total / n as f64
}

/// Regrouped by lag `r = k - l`: `(1/n) Re Σ_r ρ(r) e^{irx} Σ_l e^{il(x-y)}`
/// with the inner geometric sum in closed form.
pub fn two_point_cov_lag_sum(rho: &CorrelationSequence, n: usize, x: f64, y: f64) -> f64 {
    let theta = x - y;
    let half_sin = (0.5 * theta).sin();
    let mut total = 0.0;
    let ni = n as i64;
    for r in -(ni - 1)..ni {
        let p = rho.at(r);
        if p == 0.0 {
            continue;
        }
        let lo = 1.max(1 - r);
        let hi = ni.min(ni - r);
        let count = (hi - lo + 1) as f64;
        // Σ_{l=lo}^{hi} e^{ilθ} = e^{i(lo+hi)θ/2} sin(count θ/2) / sin(θ/2)
        let ratio = if half_sin.abs() < SINGULARITY_GUARD {
            count * (1.0 - (count * count - 1.0) * theta * theta / 24.0)
        } else {
            (0.5 * count * theta).sin() / half_sin
        };
        let phase = r as f64 * x + 0.5 * (lo + hi) as f64 * theta;
        total += p * phase.cos() * ratio;
    }
    total / n as f64
}

/// `cos((n+1)(x-y)/2) ∫ (1/n) D(x-u) D(y-u) μ(du)`: the polarized Fejér
/// kernel against the measure itself, atoms exactly and the density by
/// adaptive quadrature.
pub fn two_point_cov_polarized(measure: &SpectralMeasure, n: usize, x: f64, y: f64) -> Result<f64> {
    let nf = n as f64;
    let kernel = |u: f64| dirichlet_eval(n, x - u) * dirichlet_eval(n, y - u) / nf;
    let mut integral: f64 = measure
        .atoms()
        .iter()
        .map(|a| 0.5 * a.weight * (kernel(a.alpha) + kernel(-a.alpha)))
        .sum();
    if let Some(d) = measure.density() {
        let kinks: Vec<f64> = d.kinks().iter().flat_map(|&k| [k, -k]).collect();
        let quad = AdaptiveSimpson::new(1e-13).with_min_panels(64.max(8 * n));
        let r = quad
            .integrate(|u| kernel(u) * d.eval(u), -PI, PI, &kinks)
            .map_err(|e| Error::QuadratureNonConvergence {
                lag: n,
                budget: e.evaluations,
            })?;
        integral += r.value;
    }
    Ok((0.5 * (nf + 1.0) * (x - y)).cos() * integral)
}
