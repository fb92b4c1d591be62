//! Kac–Rice expected zero counts and their predicted limits.
//!
//! The normalized density of zeros at `x` is
//! `√(s2/(n² s0) - (s1/(n s0))²)`, and `E[N(f_n, [a, b])] / n` is its
//! integral over `[a, b]` divided by π.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::map_range;
use crate::kernels::{alpha_n, convolution_profile_with_offset, default_grid_size, MomentEvaluator};
use crate::spectral::{nodal_measure, CorrelationSequence, DensitySpec, SpectralMeasure};

/// Variances below this are treated as degenerate.
pub const DEGENERATE_S0: f64 = 1e-14;
/// Relative change under grid doubling that ends the refinement.
pub const RELATIVE_TOLERANCE: f64 = 1e-4;
/// Largest grid the refinement may use.
pub const MAX_GRID: usize = 1 << 22;
/// Sub-midpoints used to replace a degenerate cell.
const SUBDIVISION: usize = 4;

/// `2/√3`, the universal limit.
pub fn universal_limit() -> f64 {
    2.0 / 3f64.sqrt()
}

/// `λ/(π√2) + (2π - λ)/(π√3)` for a nodal set of measure `λ`.
pub fn nonuniversal_limit(lambda: f64) -> f64 {
    lambda / (PI * SQRT_2) + (2.0 * PI - lambda) / (PI * 3f64.sqrt())
}

/// `(2/n) √((n+1)(2n+1)/6)`: the exact ratio for independent coefficients.
pub fn independent_ratio(n: usize) -> f64 {
    let nf = n as f64;
    2.0 / nf * ((nf + 1.0) * (2.0 * nf + 1.0) / 6.0).sqrt()
}

fn radicand(n: usize, s0: f64, s1: f64, s2: f64) -> f64 {
    let nf = n as f64;
    let a = s2 / (nf * nf * s0);
    let b = s1 / (nf * s0);
    (a - b * b).max(0.0).sqrt()
}

/// Normalized Kac–Rice integrand at a single point.
pub fn integrand_at(rho: &CorrelationSequence, n: usize, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    let (s0, s1, s2) = crate::kernels::moments_at(rho, n, x)?;
    if s0 < DEGENERATE_S0 {
        return Err(Error::DegenerateVariance { x, s0 });
    }
    Ok(radicand(n, s0, s1, s2))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KacRiceProfile {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    /// Number of midpoints on the final grid over `[a, b]`.
    pub m: usize,
    pub integrand: Vec<f64>,
    /// `E[N(f_n, [a, b])] / n`.
    pub ratio: f64,
    /// Change of the ratio under the last grid doubling.
    pub quadrature_error_estimate: f64,
    pub converged: bool,
    /// Cells whose midpoint had degenerate variance and were subdivided.
    pub degenerate_cells: usize,
}

impl KacRiceProfile {
    /// Midpoint abscissa of cell `j`.
    pub fn x(&self, j: usize) -> f64 {
        self.a + (j as f64 + 0.5) * (self.b - self.a) / self.m as f64
    }
}

struct GridPass {
    integrand: Vec<f64>,
    ratio: f64,
    degenerate: usize,
}

/// Value for a cell whose midpoint is degenerate: the mean over
/// nondegenerate sub-midpoints, 0 if none.
fn subdivided_cell(eval: &MomentEvaluator, n: usize, center: f64, width: f64) -> f64 {
    let mut sum = 0.0;
    let mut used = 0usize;
    for i in 0..SUBDIVISION {
        let x = center - 0.5 * width + (i as f64 + 0.5) * width / SUBDIVISION as f64;
        let (s0, s1, s2) = eval.at(x);
        if s0 >= DEGENERATE_S0 {
            sum += radicand(n, s0, s1, s2);
            used += 1;
        }
    }
    if used == 0 {
        0.0
    } else {
        sum / used as f64
    }
}

fn full_circle_pass(rho: &CorrelationSequence, n: usize, eval: &MomentEvaluator, m: usize) -> Result<GridPass> {
    let h = 2.0 * PI / m as f64;
    let p = convolution_profile_with_offset(rho, n, m, 0.5 * h)?;
    let mut degenerate = 0;
    let mut integrand = Vec::with_capacity(m);
    for j in 0..m {
        if p.s0[j] < DEGENERATE_S0 {
            degenerate += 1;
            integrand.push(subdivided_cell(eval, n, p.x(j), h));
        } else {
            integrand.push(radicand(n, p.s0[j], p.s1[j], p.s2[j]));
        }
    }
    let ratio = integrand.iter().sum::<f64>() * h / PI;
    Ok(GridPass {
        integrand,
        ratio,
        degenerate,
    })
}

fn interval_pass(eval: &MomentEvaluator, n: usize, a: f64, b: f64, m: usize) -> GridPass {
    let h = (b - a) / m as f64;
    let cells = map_range(m, |j| {
        let x = a + (j as f64 + 0.5) * h;
        let (s0, s1, s2) = eval.at(x);
        if s0 < DEGENERATE_S0 {
            (subdivided_cell(eval, n, x, h), true)
        } else {
            (radicand(n, s0, s1, s2), false)
        }
    });
    let degenerate = cells.iter().filter(|c| c.1).count();
    let integrand: Vec<f64> = cells.into_iter().map(|c| c.0).collect();
    let ratio = integrand.iter().sum::<f64>() * h / PI;
    GridPass {
        integrand,
        ratio,
        degenerate,
    }
}

/// `E[N(f_n, [a, b])] / n` by the midpoint rule, doubling the grid until the
/// relative change drops below `1e-4` or the grid reaches `2^22` points.
/// Full-circle grids are evaluated by FFT, sub-intervals by direct sums.
pub fn expected_zero_ratio(rho: &CorrelationSequence, n: usize, a: f64, b: f64) -> Result<KacRiceProfile> {
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    if !(a >= 0.0 && a < b && b <= 2.0 * PI + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "interval [{a}, {b}] must satisfy 0 <= a < b <= 2π"
        )));
    }
    rho.require_lag(n)?;
    let eval = MomentEvaluator::new(rho, n)?;
    let full = a == 0.0 && (b - 2.0 * PI).abs() <= 1e-12;
    let base = default_grid_size(n);
    let size = |scale: usize| -> usize {
        if full {
            base * scale
        } else {
            (((b - a) / (2.0 * PI) * (base * scale) as f64).ceil() as usize).max(1)
        }
    };
    let pass = |m: usize| -> Result<GridPass> {
        if full {
            full_circle_pass(rho, n, &eval, m)
        } else {
            Ok(interval_pass(&eval, n, a, b, m))
        }
    };

    let mut scale = 1;
    let mut m = size(scale);
    let mut current = pass(m)?;
    let mut error = f64::INFINITY;
    let mut converged = false;
    while base * scale * 2 <= MAX_GRID {
        scale *= 2;
        let m_next = size(scale);
        let next = pass(m_next)?;
        error = (next.ratio - current.ratio).abs();
        current = next;
        m = m_next;
        if error <= RELATIVE_TOLERANCE * current.ratio.abs() {
            converged = true;
            break;
        }
    }
    Ok(KacRiceProfile {
        n,
        a,
        b: if full { 2.0 * PI } else { b },
        m,
        integrand: current.integrand,
        ratio: current.ratio,
        quadrature_error_estimate: error,
        converged,
        degenerate_cells: current.degenerate,
    })
}

/// Full-circle ratio for a measure at degree `n`.
pub fn expected_zero_ratio_for(measure: &SpectralMeasure, n: usize) -> Result<KacRiceProfile> {
    let rho = measure.correlation(n.max(1))?;
    expected_zero_ratio(&rho, n, 0.0, 2.0 * PI)
}

/// Integrand at the `m` midpoints `(j + 1/2) 2π/m`, with no refinement.
pub fn integrand_profile(rho: &CorrelationSequence, n: usize, m: usize) -> Result<Vec<(f64, f64)>> {
    let eval = MomentEvaluator::new(rho, n)?;
    let p = full_circle_pass(rho, n, &eval, m)?;
    let h = 2.0 * PI / m as f64;
    Ok(p.integrand
        .into_iter()
        .enumerate()
        .map(|(j, v)| ((j as f64 + 0.5) * h, v))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "regime", rename_all = "snake_case")]
pub enum Regime {
    NonUniversal {
        nodal_measure: f64,
    },
    Universal,
    /// No density: ratios oscillate inside `[low, high]` without converging.
    AtomicNonconvergent {
        low: f64,
        high: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitPrediction {
    /// Limit of `E[N]/n`, absent when no limit exists.
    pub limit: Option<f64>,
    pub regime: Regime,
}

impl LimitPrediction {
    /// Whether `value` is consistent with the prediction within `tol`.
    pub fn accepts(&self, value: f64, tol: f64) -> bool {
        match (self.limit, self.regime) {
            (Some(l), _) => (value - l).abs() < tol,
            (None, Regime::AtomicNonconvergent { low, high }) => value >= low - tol && value <= high + tol,
            (None, _) => false,
        }
    }
}

/// Limit predicted from the nodal measure of the density; `None` for a
/// purely atomic measure.
pub fn predicted_limit(density: Option<&DensitySpec>) -> LimitPrediction {
    match density {
        None => LimitPrediction {
            limit: None,
            regime: Regime::AtomicNonconvergent { low: SQRT_2, high: 2.0 },
        },
        Some(d) => predicted_limit_for_nodal(nodal_measure(d)),
    }
}

pub fn predicted_limit_for_nodal(lambda: f64) -> LimitPrediction {
    if lambda <= 0.0 {
        LimitPrediction {
            limit: Some(universal_limit()),
            regime: Regime::Universal,
        }
    } else {
        LimitPrediction {
            limit: Some(nonuniversal_limit(lambda.min(2.0 * PI))),
            regime: Regime::NonUniversal { nodal_measure: lambda },
        }
    }
}

/// Diagnostic comparing the Fejér and `L_n` convolutions against `2πψ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L2LimitDiagnostic {
    pub n: usize,
    pub grid: Vec<f64>,
    /// `n (s0 - 2πψ)`.
    pub fejer: Vec<f64>,
    /// `(2/(n α_n)) (α_n s2 - 2πψ)`.
    pub ln: Vec<f64>,
    /// `Σ_{n<k<=R} k² ρ(k)²` over the available lags.
    pub tail: f64,
    pub reliable: bool,
}

/// Both rescaled convolution errors on `grid`; they share the limit
/// `-Σ |k| ρ(k) e^{ikx}` when `Σ k² ρ(k)²` converges.
pub fn l2_limit_operator(
    measure: &SpectralMeasure,
    rho: &CorrelationSequence,
    n: usize,
    grid: &[f64],
) -> Result<L2LimitDiagnostic> {
    rho.require_lag(n)?;
    let eval = MomentEvaluator::new(rho, n)?;
    let nf = n as f64;
    let an = alpha_n(n);
    let mut fejer = Vec::with_capacity(grid.len());
    let mut ln = Vec::with_capacity(grid.len());
    for &x in grid {
        let (s0, _, s2) = eval.at(x);
        let target = 2.0 * PI * measure.psi(x);
        fejer.push(nf * (s0 - target));
        ln.push(2.0 / (nf * an) * (an * s2 - target));
    }
    let tail: f64 = (n + 1..=rho.max_lag()).map(|k| (k as f64 * rho.get(k)).powi(2)).sum();
    Ok(L2LimitDiagnostic {
        n,
        grid: grid.to_vec(),
        fejer,
        ln,
        tail,
        reliable: rho.max_lag() >= 4 * n && tail < 1e-6,
    })
}
