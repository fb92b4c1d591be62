//! Salem–Zygmund checks: characteristic functions of `f_n(X)` for uniform
//! `X`, and variances of the process localized at scale `1/n`.
//!
//! Given the coefficients, `f_n(X)` is compared with the Gaussian mixture
//! `√(2πψ(X)) N`, whose characteristic function is
//! `(1/2π) ∫ exp(-(t²/2) 2πψ(x)) dx`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernels::{convolution_profile, two_point_cov};
use crate::quad::AdaptiveSimpson;
use crate::sampler::CoefficientSample;
use crate::spectral::{CorrelationSequence, DensitySpec, SpectralMeasure};
use crate::zeros::evaluate_grid;

/// Tolerance of the limit characteristic function quadrature.
pub const LIMIT_CF_TOL: f64 = 1e-10;

/// `sin(t)/t`, with `1 - t²/6` below `|t| = 1e-8`.
pub fn sinc(t: f64) -> f64 {
    if t.abs() < 1e-8 {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

/// 61 points on `[-3, 3]`.
pub fn default_t_grid() -> Vec<f64> {
    (-30..=30).map(|i| i as f64 / 10.0).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CfKind {
    Empirical,
    Conditional,
    Limit,
}

impl CfKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CfKind::Empirical => "empirical",
            CfKind::Conditional => "conditional",
            CfKind::Limit => "limit",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CharFunctionCurve {
    pub t_grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub kind: CfKind,
    /// Degree for the empirical and conditional curves.
    pub n: Option<usize>,
}

/// Evaluates `g(|t|)` and conjugates for negative `t`, so the curve is
/// Hermitian by construction.
fn hermitian(t_grid: &[f64], mut g: impl FnMut(f64) -> Complex64) -> Vec<Complex64> {
    t_grid
        .iter()
        .map(|&t| {
            if t == 0.0 {
                Complex64::new(1.0, 0.0)
            } else if t > 0.0 {
                g(t)
            } else {
                g(-t).conj()
            }
        })
        .collect()
}

/// `(1/M) Σ_m exp(i t f_n(x_m))` over the `M`-point grid.
pub fn empirical_cf(sample: &CoefficientSample, t_grid: &[f64], m: usize) -> Result<CharFunctionCurve> {
    let values = evaluate_grid(sample, m)?;
    Ok(empirical_cf_from_values(&values, t_grid, sample.n))
}

/// Same as [`empirical_cf`] from precomputed grid values of `f_n`.
pub fn empirical_cf_from_values(values: &[f64], t_grid: &[f64], n: usize) -> CharFunctionCurve {
    let m = values.len() as f64;
    let curve = hermitian(t_grid, |t| {
        let (mut re, mut im) = (0.0, 0.0);
        for &f in values {
            let (s, c) = (t * f).sin_cos();
            re += c;
            im += s;
        }
        Complex64::new(re / m, im / m)
    });
    CharFunctionCurve {
        t_grid: t_grid.to_vec(),
        values: curve,
        kind: CfKind::Empirical,
        n: Some(n),
    }
}

/// `(1/M) Σ_m exp(-(t²/2) s0(x_m))`: the characteristic function averaged
/// over the coefficients.
pub fn conditional_cf(rho: &CorrelationSequence, n: usize, t_grid: &[f64], m: usize) -> Result<CharFunctionCurve> {
    let profile = convolution_profile(rho, n, m)?;
    let mf = m as f64;
    let values = hermitian(t_grid, |t| {
        let v: f64 = profile.s0.iter().map(|&s| (-0.5 * t * t * s.max(0.0)).exp()).sum();
        Complex64::new(v / mf, 0.0)
    });
    Ok(CharFunctionCurve {
        t_grid: t_grid.to_vec(),
        values,
        kind: CfKind::Conditional,
        n: Some(n),
    })
}

/// `(1/2π) ∫ exp(-(t²/2) 2πψ(x)) dx` by adaptive quadrature.
pub fn limit_cf(density: &DensitySpec, t_grid: &[f64]) -> Result<CharFunctionCurve> {
    let kinks = density.kinks();
    let quad = AdaptiveSimpson::new(LIMIT_CF_TOL).with_min_panels(64);
    let mut failure = None;
    let values = hermitian(t_grid, |t| {
        let r = quad.integrate(|x| (-0.5 * t * t * 2.0 * PI * density.eval(x)).exp(), 0.0, PI, &kinks);
        match r {
            Ok(q) => Complex64::new(q.value / PI, 0.0),
            Err(e) => {
                failure = Some(e.evaluations);
                Complex64::new(e.partial / PI, 0.0)
            }
        }
    });
    if let Some(budget) = failure {
        return Err(Error::QuadratureNonConvergence { lag: 0, budget });
    }
    Ok(CharFunctionCurve {
        t_grid: t_grid.to_vec(),
        values,
        kind: CfKind::Limit,
        n: None,
    })
}

/// `sup_t |φ_1(t) - φ_2(t)|` over a shared grid.
pub fn cf_distance(a: &CharFunctionCurve, b: &CharFunctionCurve) -> Result<f64> {
    if a.t_grid != b.t_grid {
        return Err(Error::GridMismatch);
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max))
}

/// Distance restricted to `|t| <= t_max`.
pub fn cf_distance_within(a: &CharFunctionCurve, b: &CharFunctionCurve, t_max: f64) -> Result<f64> {
    if a.t_grid != b.t_grid {
        return Err(Error::GridMismatch);
    }
    Ok(a.t_grid
        .iter()
        .zip(a.values.iter().zip(&b.values))
        .filter(|(t, _)| t.abs() <= t_max)
        .map(|(_, (x, y))| (x - y).norm())
        .fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalizedCovarianceCheck {
    pub n: usize,
    #[serde(rename = "X0")]
    pub x0: f64,
    pub t_points: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub variance_n: f64,
    /// Absent when the measure has no density.
    pub variance_limit: Option<f64>,
    pub rel_gap: Option<f64>,
}

fn check_points(t_points: &[f64], lambdas: &[f64]) -> Result<()> {
    if t_points.len() != lambdas.len() || t_points.is_empty() {
        return Err(Error::InvalidArgument(
            "t_points and lambdas must be nonempty and of equal length".into(),
        ));
    }
    Ok(())
}

/// `Var[Σ_p λ_p f_n(X0 + t_p/n)]` against `2πψ(X0) Σ λ_p λ_q sinc(t_p - t_q)`.
pub fn localized_variance(
    measure: &SpectralMeasure,
    rho: &CorrelationSequence,
    n: usize,
    x0: f64,
    t_points: &[f64],
    lambdas: &[f64],
) -> Result<LocalizedCovarianceCheck> {
    check_points(t_points, lambdas)?;
    let nf = n as f64;
    let mut variance_n = 0.0;
    let mut sinc_form = 0.0;
    for (p, (&tp, &lp)) in t_points.iter().zip(lambdas).enumerate() {
        for (q, (&tq, &lq)) in t_points.iter().zip(lambdas).enumerate() {
            let cov = if p <= q {
                two_point_cov(rho, n, x0 + tp / nf, x0 + tq / nf)?
            } else {
                two_point_cov(rho, n, x0 + tq / nf, x0 + tp / nf)?
            };
            variance_n += lp * lq * cov;
            sinc_form += lp * lq * sinc(tp - tq);
        }
    }
    let variance_limit = measure.density().map(|_| 2.0 * PI * measure.psi(x0) * sinc_form);
    let rel_gap = variance_limit.map(|l| (variance_n - l).abs() / l.abs());
    Ok(LocalizedCovarianceCheck {
        n,
        x0,
        t_points: t_points.to_vec(),
        lambdas: lambdas.to_vec(),
        variance_n,
        variance_limit,
        rel_gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationCheck {
    pub sum: f64,
    pub limit: f64,
    pub gap: f64,
}

/// `Σ λ_p λ_q (1/n) Σ_{k=1}^{n} cos(k (t_p - t_q)/n)` and its sinc limit.
pub fn normalization_sum(n: usize, t_points: &[f64], lambdas: &[f64]) -> Result<NormalizationCheck> {
    check_points(t_points, lambdas)?;
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    let nf = n as f64;
    let mut sum = 0.0;
    let mut limit = 0.0;
    for (&tp, &lp) in t_points.iter().zip(lambdas) {
        for (&tq, &lq) in t_points.iter().zip(lambdas) {
            let d = tp - tq;
            let riemann: f64 = (1..=n).map(|k| (k as f64 * d / nf).cos()).sum::<f64>() / nf;
            sum += lp * lq * riemann;
            limit += lp * lq * sinc(d);
        }
    }
    Ok(NormalizationCheck {
        sum,
        limit,
        gap: (sum - limit).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn sinc_patch_is_continuous() {
        assert_eq!(sinc(0.0), 1.0);
        assert_abs_diff_eq!(sinc(1e-8 * 0.999), sinc(1e-8 * 1.001), epsilon = 1e-15);
        assert_abs_diff_eq!(sinc(PI), 0.0, epsilon = 1e-16);
    }

    #[test]
    fn empirical_cf_of_cosine_is_bessel() {
        let s = CoefficientSample::from_coefficients(vec![1.0], vec![0.0]).unwrap();
        let t = vec![-1.0, 0.0, 1.0];
        let c = empirical_cf(&s, &t, 4096).unwrap();
        assert_eq!(c.values[1], Complex64::new(1.0, 0.0));
        // J_0(1) by quadrature of (1/π) ∫_0^π cos(cos θ) dθ
        let j0 = AdaptiveSimpson::new(1e-14)
            .integrate(|x: f64| x.cos().cos(), 0.0, PI, &[])
            .unwrap()
            .value
            / PI;
        assert_abs_diff_eq!(j0, 0.76520, epsilon = 1e-5);
        assert_abs_diff_eq!(c.values[2].re, j0, epsilon = 1e-12);
        assert_eq!(c.values[0], c.values[2].conj());
    }

    #[test]
    fn conditional_cf_independent_is_gaussian() {
        let t = default_t_grid();
        let c = conditional_cf(&CorrelationSequence::independent(16), 16, &t, 64).unwrap();
        for (t, v) in t.iter().zip(&c.values) {
            assert_abs_diff_eq!(v.re, (-0.5 * t * t).exp(), epsilon = 1e-12);
            assert_eq!(v.im, 0.0);
        }
    }

    #[test]
    fn limit_cf_values() {
        let t = vec![0.0, 1.0, 40.0];
        let u = limit_cf(&DensitySpec::uniform(), &t).unwrap();
        assert_abs_diff_eq!(u.values[1].re, (-0.5f64).exp(), epsilon = 1e-10);
        let b = limit_cf(&DensitySpec::box_density(PI / 2.0).unwrap(), &t).unwrap();
        assert_abs_diff_eq!(b.values[1].re, 0.5 * (1.0 + (-1.0f64).exp()), epsilon = 1e-9);
        assert_abs_diff_eq!(b.values[1].re, 0.683940, epsilon = 1e-6);
        // only the nodal set survives for large t
        assert_abs_diff_eq!(b.values[2].re, 0.5, epsilon = 1e-9);
    }

    #[test]
    fn distance_requires_matching_grids() {
        let a = limit_cf(&DensitySpec::uniform(), &[0.0, 1.0]).unwrap();
        let b = limit_cf(&DensitySpec::uniform(), &[0.0, 2.0]).unwrap();
        assert_eq!(cf_distance(&a, &a).unwrap(), 0.0);
        assert_eq!(cf_distance(&a, &b), Err(Error::GridMismatch));
    }

    #[test]
    fn localized_variance_independent_single_point() {
        let m = SpectralMeasure::uniform();
        let rho = m.correlation(8).unwrap();
        let c = localized_variance(&m, &rho, 8, 0.4, &[0.0], &[1.0]).unwrap();
        assert_abs_diff_eq!(c.variance_n, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.variance_limit.unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn localized_limit_at_half_period() {
        let m = SpectralMeasure::from_density(DensitySpec::poisson(0.5).unwrap()).unwrap();
        let rho = m.correlation(64).unwrap();
        let x0 = 1.0;
        let c = localized_variance(&m, &rho, 64, x0, &[0.0, PI], &[1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(c.variance_limit.unwrap(), 4.0 * PI * m.psi(x0), epsilon = 1e-12);
    }

    #[test]
    fn atomic_measure_has_no_limit() {
        let m = SpectralMeasure::atomic(1.0).unwrap();
        let rho = m.correlation(16).unwrap();
        let c = localized_variance(&m, &rho, 16, 0.3, &[0.0], &[1.0]).unwrap();
        assert!(c.variance_limit.is_none());
    }

    #[test]
    fn normalization_values() {
        for n in [1, 7, 300] {
            assert_abs_diff_eq!(normalization_sum(n, &[0.0], &[1.0]).unwrap().sum, 1.0, epsilon = 1e-15);
        }
        let c = normalization_sum(2, &[0.0, PI], &[1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(c.sum, 1.0, epsilon = 1e-12);
    }
}
