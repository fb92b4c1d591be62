//! Spectral measures, their correlation sequences, and the regularity and
//! integrability checks that decide which zero-count law applies.
//!
//! A [`SpectralMeasure`] is a symmetric probability measure on `[-π, π]`,
//! stored as a list of folded atoms plus an optional [`DensitySpec`]. The
//! correlation of the coefficient sequence is its Fourier transform,
//! `ρ(k) = Σ_j w_j cos(k α_j) + ∫ cos(k x) ψ(x) dx`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourier::cosine_series_on_grid;
use crate::quad::AdaptiveSimpson;

/// Tolerance on the total mass of a spectral measure.
pub const MASS_TOLERANCE: f64 = 1e-10;
/// Threshold below which a tabulated density counts as zero.
pub const ZERO_THRESHOLD: f64 = 1e-12;
/// Grid size for nodal-set and hypothesis quadratures.
pub const HYPOTHESIS_GRID: usize = 1 << 16;
/// Running sums beyond this are reported as infinite.
pub const INFINITE_CAP: f64 = 1e12;
/// Absolute tolerance for correlation quadrature.
pub const CORRELATION_TOL: f64 = 1e-10;
/// Acceptance threshold for both PSD checks.
pub const PSD_TOLERANCE: f64 = -1e-8;

/// Reduces an angle to `[0, π]` using periodicity and evenness.
pub fn fold_angle(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut y = x.abs().rem_euclid(two_pi);
    if y > PI {
        y = two_pi - y;
    }
    y
}

/// A symmetric pair of point masses `w (δ_α + δ_{-α}) / 2`; a single mass
/// when `α` is 0 or π.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub alpha: f64,
    pub weight: f64,
}

impl Atom {
    pub fn new(alpha: f64, weight: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&alpha) || !alpha.is_finite() {
            return Err(Error::measure("atoms.alpha", format!("{alpha} is outside [0, π]")));
        }
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(Error::measure("atoms.weight", format!("{weight} must be positive")));
        }
        Ok(Self { alpha, weight })
    }

    pub fn correlation(&self, k: usize) -> f64 {
        self.weight * (k as f64 * self.alpha).cos()
    }
}

/// Piecewise-linear density tabulated on `[0, π]` and extended evenly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TabulatedDensity {
    grid: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedDensity {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::measure("density.tabulated", "grid and values differ in length"));
        }
        if grid.len() < 2 {
            return Err(Error::measure("density.tabulated", "at least two points are required"));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::measure("density.tabulated", "grid must be strictly increasing"));
        }
        if grid[0].abs() > 1e-9 || (grid[grid.len() - 1] - PI).abs() > 1e-9 {
            return Err(Error::measure("density.tabulated", "grid must span [0, π]"));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::measure(
                "density.tabulated",
                format!("negative or non-finite value {v}"),
            ));
        }
        let mut grid = grid;
        let last = grid.len() - 1;
        grid[0] = 0.0;
        grid[last] = PI;
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Linear interpolation at `y ∈ [0, π]`.
    fn interpolate(&self, y: f64) -> f64 {
        let g = &self.grid;
        let i = g.partition_point(|&t| t <= y);
        if i == 0 {
            return self.values[0];
        }
        if i >= g.len() {
            return self.values[g.len() - 1];
        }
        let (x0, x1) = (g[i - 1], g[i]);
        let t = (y - x0) / (x1 - x0);
        self.values[i - 1] * (1.0 - t) + self.values[i] * t
    }

    /// Exact mass of the even extension over `[-π, π]`.
    fn mass(&self) -> f64 {
        2.0 * self
            .grid
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(x, v)| 0.5 * (v[0] + v[1]) * (x[1] - x[0]))
            .sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DensityKind {
    /// `1/2π` on the whole circle: the independent case.
    Uniform,
    /// `1/(2a)` on `[-a, a]`.
    Box {
        a: f64,
    },
    /// `1/(2(a-b))` on `b <= |x| <= a`.
    Annulus {
        b: f64,
        a: f64,
    },
    /// Poisson kernel with correlation `r^k`.
    Poisson {
        r: f64,
    },
    /// Uniform density carrying mass `1 - r`, paired with an atom of mass `r`
    /// at 0 so that `ρ(k) = r` for every `k >= 1`.
    ConstantCorr {
        r: f64,
    },
    /// `(1 + cos x)^2 / 3π`, vanishing to fourth order at π.
    RaisedCosineSquared,
    Tabulated(TabulatedDensity),
}

/// A spectral density `ψ = weight · ψ̂`, where `ψ̂` is the unit-mass shape
/// of the kind (tabulated shapes keep their own mass).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensitySpec {
    kind: DensityKind,
    weight: f64,
}

impl DensitySpec {
    /// Validates the parameters and assigns the natural weight
    /// (`1 - r` for `constant_corr`, 1 otherwise).
    pub fn new(kind: DensityKind) -> Result<Self> {
        match &kind {
            DensityKind::Box { a } => {
                if !(*a > 0.0 && *a < PI) {
                    return Err(Error::measure("density.a", format!("box requires 0 < a < π, got {a}")));
                }
            }
            DensityKind::Annulus { b, a } => {
                if !(*b >= 0.0 && b < a && *a <= PI) {
                    return Err(Error::measure(
                        "density.a",
                        format!("annulus requires 0 <= b < a <= π, got b = {b}, a = {a}"),
                    ));
                }
            }
            DensityKind::Poisson { r } => {
                if !(r.abs() < 1.0) {
                    return Err(Error::measure(
                        "density.r",
                        format!("poisson requires |r| < 1, got {r}"),
                    ));
                }
            }
            // A negative constant correlation is not positive definite
            // beyond a handful of lags.
            DensityKind::ConstantCorr { r } if !(*r >= 0.0 && *r < 1.0) => {
                return Err(Error::measure(
                    "density.r",
                    format!("constant_corr requires 0 <= r < 1, got {r}"),
                ));
            }
            _ => {}
        }
        let weight = match &kind {
            DensityKind::ConstantCorr { r } => 1.0 - r,
            _ => 1.0,
        };
        Ok(Self { kind, weight })
    }

    pub fn uniform() -> Self {
        Self::new(DensityKind::Uniform).expect("uniform is valid")
    }

    pub fn box_density(a: f64) -> Result<Self> {
        Self::new(DensityKind::Box { a })
    }

    pub fn annulus(b: f64, a: f64) -> Result<Self> {
        Self::new(DensityKind::Annulus { b, a })
    }

    pub fn poisson(r: f64) -> Result<Self> {
        Self::new(DensityKind::Poisson { r })
    }

    pub fn constant_corr(r: f64) -> Result<Self> {
        Self::new(DensityKind::ConstantCorr { r })
    }

    pub fn raised_cosine_squared() -> Self {
        Self::new(DensityKind::RaisedCosineSquared).expect("valid")
    }

    pub fn tabulated(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(DensityKind::Tabulated(TabulatedDensity::new(grid, values)?))
    }

    /// Rescales the density to carry total mass `weight · shape mass`.
    pub fn with_weight(mut self, weight: f64) -> Result<Self> {
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(Error::measure("density.weight", format!("{weight} must be positive")));
        }
        self.weight = weight;
        Ok(self)
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn name(&self) -> &'static str {
        match self.kind {
            DensityKind::Uniform => "uniform",
            DensityKind::Box { .. } => "box",
            DensityKind::Annulus { .. } => "annulus",
            DensityKind::Poisson { .. } => "poisson",
            DensityKind::ConstantCorr { .. } => "constant_corr",
            DensityKind::RaisedCosineSquared => "raised_cosine_squared",
            DensityKind::Tabulated(_) => "tabulated",
        }
    }

    /// Atoms that the kind implies (only `constant_corr` has one).
    pub fn implied_atoms(&self) -> Vec<Atom> {
        match self.kind {
            DensityKind::ConstantCorr { r } if r > 0.0 => vec![Atom { alpha: 0.0, weight: r }],
            _ => Vec::new(),
        }
    }

    fn shape_at(&self, y: f64) -> f64 {
        match &self.kind {
            DensityKind::Uniform | DensityKind::ConstantCorr { .. } => 1.0 / (2.0 * PI),
            DensityKind::Box { a } => {
                if y <= *a {
                    1.0 / (2.0 * a)
                } else {
                    0.0
                }
            }
            DensityKind::Annulus { b, a } => {
                if y >= *b && y <= *a {
                    1.0 / (2.0 * (a - b))
                } else {
                    0.0
                }
            }
            DensityKind::Poisson { r } => (1.0 - r * r) / (2.0 * PI * (1.0 - 2.0 * r * y.cos() + r * r)),
            DensityKind::RaisedCosineSquared => {
                let c = 1.0 + y.cos();
                c * c / (3.0 * PI)
            }
            DensityKind::Tabulated(t) => t.interpolate(y),
        }
    }

    /// `ψ(x)`, evaluated at `|x|` after reduction to `[-π, π]`.
    pub fn eval(&self, x: f64) -> f64 {
        self.weight * self.shape_at(fold_angle(x))
    }

    /// `∫_{-π}^{π} ψ(x) dx`.
    pub fn mass(&self) -> f64 {
        match &self.kind {
            DensityKind::Tabulated(t) => self.weight * t.mass(),
            _ => self.weight,
        }
    }

    /// Points in `[0, π]` where `ψ` fails to be smooth.
    pub fn kinks(&self) -> Vec<f64> {
        match &self.kind {
            DensityKind::Box { a } => vec![*a],
            DensityKind::Annulus { b, a } => vec![*b, *a],
            DensityKind::Tabulated(t) => t.grid.clone(),
            _ => Vec::new(),
        }
    }

    pub fn has_closed_form(&self) -> bool {
        !matches!(self.kind, DensityKind::Tabulated(_))
    }

    /// Closed-form `∫ cos(kx) ψ(x) dx` when the kind has one.
    pub fn closed_form_fourier(&self, k: usize) -> Option<f64> {
        let kf = k as f64;
        let shape = match &self.kind {
            DensityKind::Uniform | DensityKind::ConstantCorr { .. } => {
                if k == 0 {
                    1.0
                } else {
                    0.0
                }
            }
            DensityKind::Box { a } => {
                if k == 0 {
                    1.0
                } else {
                    (kf * a).sin() / (kf * a)
                }
            }
            DensityKind::Annulus { b, a } => {
                if k == 0 {
                    1.0
                } else {
                    ((kf * a).sin() - (kf * b).sin()) / (kf * (a - b))
                }
            }
            DensityKind::Poisson { r } => r.powi(k as i32),
            DensityKind::RaisedCosineSquared => match k {
                0 => 1.0,
                1 => 2.0 / 3.0,
                2 => 1.0 / 6.0,
                _ => 0.0,
            },
            DensityKind::Tabulated(_) => return None,
        };
        Some(self.weight * shape)
    }

    /// `∫ cos(kx) ψ(x) dx` by adaptive Simpson on `[0, π]` (doubled).
    pub fn quadrature_fourier(&self, k: usize) -> Result<f64> {
        let quad = AdaptiveSimpson::new(0.5 * CORRELATION_TOL).with_min_panels(16.max(4 * k));
        let kf = k as f64;
        let kinks = self.kinks();
        quad.integrate(|x| (kf * x).cos() * self.eval(x), 0.0, PI, &kinks)
            .map(|r| 2.0 * r.value)
            .map_err(|e| Error::QuadratureNonConvergence {
                lag: k,
                budget: e.evaluations,
            })
    }

    pub fn fourier(&self, k: usize) -> Result<f64> {
        match self.closed_form_fourier(k) {
            Some(v) => Ok(v),
            None => self.quadrature_fourier(k),
        }
    }

    /// Fourier coefficients for lags `0..=max_lag`.
    pub fn fourier_sequence(&self, max_lag: usize) -> Result<Vec<f64>> {
        (0..=max_lag).map(|k| self.fourier(k)).collect()
    }
}

/// Symmetric probability measure on `[-π, π]`: folded atoms plus an optional
/// absolutely continuous part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralMeasure {
    atoms: Vec<Atom>,
    density: Option<DensitySpec>,
}

impl SpectralMeasure {
    pub fn new(atoms: Vec<Atom>, density: Option<DensitySpec>) -> Result<Self> {
        for a in &atoms {
            Atom::new(a.alpha, a.weight)?;
        }
        if atoms.is_empty() && density.is_none() {
            return Err(Error::measure("measure", "neither atoms nor density given"));
        }
        let mass: f64 = atoms.iter().map(|a| a.weight).sum::<f64>() + density.as_ref().map_or(0.0, |d| d.mass());
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::measure("measure", format!("total mass is {mass}, expected 1")));
        }
        Ok(Self { atoms, density })
    }

    /// Measure of a density together with the atoms its kind implies.
    pub fn from_density(density: DensitySpec) -> Result<Self> {
        Self::new(density.implied_atoms(), Some(density))
    }

    pub fn uniform() -> Self {
        Self::from_density(DensitySpec::uniform()).expect("valid")
    }

    /// The pure atom `(δ_α + δ_{-α}) / 2`, correlation `cos(kα)`.
    pub fn atomic(alpha: f64) -> Result<Self> {
        Self::new(vec![Atom::new(alpha, 1.0)?], None)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&DensitySpec> {
        self.density.as_ref()
    }

    pub fn is_purely_atomic(&self) -> bool {
        self.density.is_none()
    }

    /// Spectral density `ψ(x)`, zero when the measure is purely singular.
    pub fn psi(&self, x: f64) -> f64 {
        self.density.as_ref().map_or(0.0, |d| d.eval(x))
    }

    /// Bochner–Herglotz transform up to `max_lag`.
    pub fn correlation(&self, max_lag: usize) -> Result<CorrelationSequence> {
        correlation_of(self, max_lag)
    }

    /// Hypothesis report of the density part; the almost-sure law further
    /// requires the measure to have no singular part.
    pub fn hypothesis_report(&self, eta: f64, gamma: f64) -> Result<Option<HypothesisReport>> {
        let Some(d) = &self.density else {
            return Ok(None);
        };
        let mut report = hypothesis_report(d, eta, gamma)?;
        if !self.atoms.is_empty() {
            report.applicable_theorems.retain(|t| *t == Theorem::MeanUniversal);
        }
        Ok(Some(report))
    }
}

/// Correlation values `ρ(0..=R)` of a stationary sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSequence {
    values: Vec<f64>,
}

impl CorrelationSequence {
    /// Checks `ρ(0) = 1` and `|ρ(k)| <= 1`; positive definiteness is left to
    /// [`validate_psd`].
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument(
                "a correlation sequence needs lags 0 and 1".into(),
            ));
        }
        if (values[0] - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!("ρ(0) = {} must be 1", values[0])));
        }
        if let Some((k, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !v.is_finite() || v.abs() > 1.0 + 1e-12)
        {
            return Err(Error::InvalidArgument(format!("|ρ({k})| = {v} exceeds 1")));
        }
        Ok(Self { values })
    }

    /// The independent case `ρ = δ_0` up to `max_lag`.
    pub fn independent(max_lag: usize) -> Self {
        let mut v = vec![0.0; max_lag.max(1) + 1];
        v[0] = 1.0;
        Self { values: v }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_lag(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn require_lag(&self, lag: usize) -> Result<()> {
        if lag > self.max_lag() {
            Err(Error::InsufficientLags {
                required: lag,
                available: self.max_lag(),
            })
        } else {
            Ok(())
        }
    }

    /// ρ as a function on all integers: even, zero beyond the stored lags.
    pub fn at(&self, k: i64) -> f64 {
        self.values.get(k.unsigned_abs() as usize).copied().unwrap_or(0.0)
    }
}

pub fn correlation_of(measure: &SpectralMeasure, max_lag: usize) -> Result<CorrelationSequence> {
    if max_lag < 1 {
        return Err(Error::InvalidArgument("max_lag must be at least 1".into()));
    }
    let mut values = match measure.density() {
        Some(d) => d.fourier_sequence(max_lag)?,
        None => vec![0.0; max_lag + 1],
    };
    for atom in measure.atoms() {
        for (k, v) in values.iter_mut().enumerate() {
            *v += atom.correlation(k);
        }
    }
    // mass is 1 within tolerance; pin ρ(0) exactly
    values[0] = 1.0;
    CorrelationSequence::new(values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsdReport {
    /// Minimum of the Fejér sums over all tested orders and grid points.
    pub fejer_min: f64,
    pub fejer_orders: Vec<usize>,
    pub toeplitz_order: usize,
    pub toeplitz_min_eigenvalue: f64,
    pub pass: bool,
}

/// Checks positive definiteness of `ρ` two ways: nonnegativity of the
/// Fejér means `Σ_{|r|<=n} (1 - |r|/n) ρ(r) e^{irx}` on `4n` points for
/// `n ∈ {R/4, R/2, R}`, and the smallest eigenvalue of a Toeplitz section.
pub fn validate_psd(rho: &CorrelationSequence) -> PsdReport {
    let r_max = rho.max_lag();
    let mut orders: Vec<usize> = [r_max / 4, r_max / 2, r_max].into_iter().filter(|&n| n >= 1).collect();
    orders.dedup();
    let mut fejer_min = f64::INFINITY;
    for &n in &orders {
        let c: Vec<f64> = (0..=n).map(|r| (1.0 - r as f64 / n as f64) * rho.get(r)).collect();
        let m = 4 * n;
        let vals = cosine_series_on_grid(&c, m, 0.0);
        fejer_min = vals.iter().copied().fold(fejer_min, f64::min);
    }
    let order = r_max.clamp(1, 64);
    let toeplitz = DMatrix::from_fn(order, order, |i, j| rho.at(i as i64 - j as i64));
    let eig = SymmetricEigen::new(toeplitz).eigenvalues;
    let min_eig = eig.iter().copied().fold(f64::INFINITY, f64::min);
    PsdReport {
        fejer_min,
        fejer_orders: orders,
        toeplitz_order: order,
        toeplitz_min_eigenvalue: min_eig,
        pass: fejer_min >= PSD_TOLERANCE && min_eig >= PSD_TOLERANCE,
    }
}

/// Lebesgue measure of `{ψ = 0}` in `[-π, π]`.
pub fn nodal_measure(density: &DensitySpec) -> f64 {
    match density.kind() {
        DensityKind::Uniform
        | DensityKind::Poisson { .. }
        | DensityKind::ConstantCorr { .. }
        | DensityKind::RaisedCosineSquared => 0.0,
        DensityKind::Box { a } => 2.0 * PI - 2.0 * a,
        DensityKind::Annulus { b, a } => 2.0 * PI - 2.0 * (a - b),
        DensityKind::Tabulated(_) => {
            let h = 2.0 * PI / HYPOTHESIS_GRID as f64;
            let zeros = (0..HYPOTHESIS_GRID)
                .filter(|&j| density.eval(-PI + (j as f64 + 0.5) * h) < ZERO_THRESHOLD)
                .count();
            zeros as f64 * h
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem {
    /// Limit depends on the nodal measure of ψ.
    NonUniversal,
    /// Expected count converges to 2/√3 (log-integrable ψ).
    MeanUniversal,
    /// Almost-sure convergence to 2/√3 (Besov regularity and a negative moment).
    AlmostSureUniversal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub eta: f64,
    pub gamma: f64,
    pub nodal_measure: f64,
    /// `∫ |log ψ|^{1+η}`, `+∞` when divergent.
    pub log_norm: f64,
    /// `∫ ψ^{-γ}`, `+∞` when divergent.
    pub neg_moment: f64,
    /// Least-squares slope of `log ω*(ψ, δ)` against `log δ`; `+∞` when the
    /// modulus vanishes identically (constant density).
    pub besov_exponent_estimate: f64,
    pub besov_moduli: Vec<(f64, f64)>,
    pub applicable_theorems: Vec<Theorem>,
}

/// Midpoint sum of `g(ψ(x))` over `[-π, π]` with `m` cells; `+∞` once the
/// running sum passes the cap.
fn midpoint_functional(density: &DensitySpec, m: usize, g: &dyn Fn(f64) -> f64) -> f64 {
    let h = 2.0 * PI / m as f64;
    let mut sum = 0.0;
    for j in 0..m {
        let v = g(density.eval(-PI + (j as f64 + 0.5) * h)) * h;
        if !v.is_finite() {
            return f64::INFINITY;
        }
        sum += v;
        if sum > INFINITE_CAP {
            return f64::INFINITY;
        }
    }
    sum
}

/// Integral on the full grid, declared divergent when refinement stops
/// shrinking the increments: for an integrable power singularity successive
/// quadrupled grids change the sum by a factor below one, for a divergent one
/// the change is flat or growing.
fn singular_integral(density: &DensitySpec, g: &dyn Fn(f64) -> f64) -> f64 {
    let coarse = midpoint_functional(density, HYPOTHESIS_GRID / 16, g);
    let mid = midpoint_functional(density, HYPOTHESIS_GRID / 4, g);
    let fine = midpoint_functional(density, HYPOTHESIS_GRID, g);
    if !fine.is_finite() || !mid.is_finite() || !coarse.is_finite() {
        return f64::INFINITY;
    }
    let d1 = (mid - coarse).abs();
    let d2 = (fine - mid).abs();
    if d2 > 1e-9 * fine.abs().max(1.0) && d2 >= 0.9 * d1 {
        return f64::INFINITY;
    }
    fine
}

/// `sup_{|h|<=δ} ‖ψ(·+h) + ψ(·-h) - 2ψ‖_{L¹}` with `h` scanned on 32 values.
pub fn besov_modulus(density: &DensitySpec, delta: f64) -> f64 {
    let m = HYPOTHESIS_GRID;
    let dx = 2.0 * PI / m as f64;
    let xs: Vec<f64> = (0..m).map(|j| -PI + (j as f64 + 0.5) * dx).collect();
    let base: Vec<f64> = xs.iter().map(|&x| density.eval(x)).collect();
    (1..=32)
        .map(|i| {
            let h = delta * i as f64 / 32.0;
            xs.iter()
                .zip(&base)
                .map(|(&x, &p)| (density.eval(x + h) + density.eval(x - h) - 2.0 * p).abs())
                .sum::<f64>()
                * dx
        })
        .fold(0.0, f64::max)
}

pub fn hypothesis_report(density: &DensitySpec, eta: f64, gamma: f64) -> Result<HypothesisReport> {
    if !(eta > 0.0) || !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "eta and gamma must be positive, got eta = {eta}, gamma = {gamma}"
        )));
    }
    let nodal = nodal_measure(density);
    let log_norm = singular_integral(density, &|p: f64| p.ln().abs().powf(1.0 + eta));
    let neg_moment = singular_integral(density, &|p: f64| p.powf(-gamma));

    let deltas: Vec<f64> = (3..=10).map(|e| 2f64.powi(-e)).collect();
    let moduli = crate::exec::map_slice(&deltas, |&d| besov_modulus(density, d));

    let pts: Vec<(f64, f64)> = deltas
        .iter()
        .zip(&moduli)
        .filter(|(_, &w)| w > 1e-15)
        .map(|(&d, &w)| (d.ln(), w.ln()))
        .collect();
    let besov = if pts.len() < 2 {
        f64::INFINITY
    } else {
        least_squares_slope(&pts)
    };

    let mut applicable = Vec::new();
    if nodal > 0.0 {
        applicable.push(Theorem::NonUniversal);
    }
    if log_norm.is_finite() {
        applicable.push(Theorem::MeanUniversal);
    }
    if neg_moment.is_finite() && besov > 1e-3 {
        applicable.push(Theorem::AlmostSureUniversal);
    }
    Ok(HypothesisReport {
        eta,
        gamma,
        nodal_measure: nodal,
        log_norm,
        neg_moment,
        besov_exponent_estimate: besov,
        besov_moduli: deltas.into_iter().zip(moduli).collect(),
        applicable_theorems: applicable,
    })
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn builtins() -> Vec<SpectralMeasure> {
        vec![
            SpectralMeasure::uniform(),
            SpectralMeasure::from_density(DensitySpec::box_density(PI / 2.0).unwrap()).unwrap(),
            SpectralMeasure::from_density(DensitySpec::box_density(PI / 4.0).unwrap()).unwrap(),
            SpectralMeasure::from_density(DensitySpec::annulus(0.5, 1.5).unwrap()).unwrap(),
            SpectralMeasure::from_density(DensitySpec::poisson(0.5).unwrap()).unwrap(),
            SpectralMeasure::from_density(DensitySpec::poisson(-0.9).unwrap()).unwrap(),
            SpectralMeasure::from_density(DensitySpec::constant_corr(0.3).unwrap()).unwrap(),
            SpectralMeasure::from_density(DensitySpec::raised_cosine_squared()).unwrap(),
            SpectralMeasure::atomic(2f64.sqrt()).unwrap(),
        ]
    }

    #[test]
    fn box_correlation_at_lag_one() {
        let m = SpectralMeasure::from_density(DensitySpec::box_density(PI / 2.0).unwrap()).unwrap();
        let rho = m.correlation(4).unwrap();
        assert_abs_diff_eq!(rho.get(1), 2.0 / PI, epsilon = 1e-15);
    }

    #[test]
    fn uniform_correlation_is_delta() {
        let rho = SpectralMeasure::uniform().correlation(10).unwrap();
        assert_eq!(rho.get(0), 1.0);
        assert!(rho.values()[1..].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn raised_cosine_correlation_matches_quadrature() {
        let d = DensitySpec::raised_cosine_squared();
        let expect = [1.0, 2.0 / 3.0, 1.0 / 6.0, 0.0];
        for (k, e) in expect.iter().enumerate() {
            assert_abs_diff_eq!(d.fourier(k).unwrap(), e, epsilon = 1e-15);
            assert_abs_diff_eq!(d.quadrature_fourier(k).unwrap(), e, epsilon = 1e-10);
        }
    }

    #[test]
    fn constant_corr_adds_atom_at_zero() {
        let m = SpectralMeasure::from_density(DensitySpec::constant_corr(0.3).unwrap()).unwrap();
        assert_eq!(m.atoms().len(), 1);
        let rho = m.correlation(5).unwrap();
        for k in 1..=5 {
            assert_abs_diff_eq!(rho.get(k), 0.3, epsilon = 1e-15);
        }
    }

    #[test]
    fn closed_forms_agree_with_quadrature() {
        let densities = [
            DensitySpec::box_density(PI / 2.0).unwrap(),
            DensitySpec::box_density(0.3).unwrap(),
            DensitySpec::annulus(0.5, 1.5).unwrap(),
            DensitySpec::poisson(0.5).unwrap(),
            DensitySpec::poisson(0.9).unwrap(),
            DensitySpec::raised_cosine_squared(),
            DensitySpec::uniform(),
            DensitySpec::constant_corr(0.3).unwrap(),
        ];
        for d in &densities {
            for k in 0..=64 {
                let closed = d.closed_form_fourier(k).unwrap();
                let quad = d.quadrature_fourier(k).unwrap();
                assert!((closed - quad).abs() < 1e-9, "{} k={k}: {closed} vs {quad}", d.name());
            }
        }
    }

    #[test]
    fn builtins_pass_psd_validation() {
        for m in builtins() {
            let rho = m.correlation(256).unwrap();
            let rep = validate_psd(&rho);
            assert!(rep.pass, "{m:?}: {rep:?}");
        }
    }

    #[test]
    fn identity_toeplitz() {
        let rep = validate_psd(&CorrelationSequence::independent(32));
        assert!(rep.pass);
        assert_abs_diff_eq!(rep.toeplitz_min_eigenvalue, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn irrational_cosine_is_psd() {
        let rho = CorrelationSequence::new((0..=128).map(|k| (k as f64 * 2f64.sqrt()).cos()).collect()).unwrap();
        assert!(validate_psd(&rho).pass);
    }

    #[test]
    fn non_psd_sequence_fails() {
        // The 3x3 section [[1,.9,0],[.9,1,.9],[0,.9,1]] has eigenvalues 1 and
        // 1 ± 0.9·√2; the smallest is negative.
        let mut v = vec![0.0; 9];
        v[0] = 1.0;
        v[1] = 0.9;
        let rho = CorrelationSequence::new(v).unwrap();
        let three = DMatrix::from_row_slice(3, 3, &[1.0, 0.9, 0.0, 0.9, 1.0, 0.9, 0.0, 0.9, 1.0]);
        let oracle = SymmetricEigen::new(three).eigenvalues.min();
        assert_abs_diff_eq!(oracle, 1.0 - 0.9 * 2f64.sqrt(), epsilon = 1e-12);
        let rep = validate_psd(&rho);
        assert!(!rep.pass);
        assert!(rep.toeplitz_min_eigenvalue <= oracle + 1e-12);
    }

    #[test]
    fn constant_point_nine_is_a_valid_correlation() {
        // atom of mass 0.9 at the origin plus a uniform density of mass 0.1
        let mut v = vec![0.9; 65];
        v[0] = 1.0;
        let rep = validate_psd(&CorrelationSequence::new(v).unwrap());
        assert!(rep.pass);
        assert_abs_diff_eq!(rep.toeplitz_min_eigenvalue, 0.1, epsilon = 1e-9);
    }

    #[test]
    fn nodal_measures() {
        assert_abs_diff_eq!(nodal_measure(&DensitySpec::box_density(PI / 2.0).unwrap()), PI);
        assert_eq!(nodal_measure(&DensitySpec::uniform()), 0.0);
        let ann = nodal_measure(&DensitySpec::annulus(0.5, 1.5).unwrap());
        assert_abs_diff_eq!(ann, 2.0 * PI - 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ann, 4.28319, epsilon = 1e-5);
    }

    #[test]
    fn tabulated_box_nodal_measure_on_grid() {
        let a = PI / 2.0;
        let grid = vec![0.0, a, a + 1e-9, PI];
        let vals = vec![1.0 / (2.0 * a), 1.0 / (2.0 * a), 0.0, 0.0];
        let d = DensitySpec::tabulated(grid, vals).unwrap();
        let h = 2.0 * PI / HYPOTHESIS_GRID as f64;
        assert!((nodal_measure(&d) - PI).abs() < 2.0 * h);
        // nodal set plus its complement cover the circle
        let positive = (0..HYPOTHESIS_GRID)
            .filter(|&j| d.eval(-PI + (j as f64 + 0.5) * h) >= ZERO_THRESHOLD)
            .count() as f64
            * h;
        assert_abs_diff_eq!(nodal_measure(&d) + positive, 2.0 * PI, epsilon = 1e-9);
        assert!((d.mass() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DensitySpec::box_density(0.0).is_err());
        assert!(DensitySpec::box_density(PI).is_err());
        assert!(DensitySpec::annulus(1.0, 0.5).is_err());
        assert!(DensitySpec::poisson(1.0).is_err());
        assert!(SpectralMeasure::new(
            vec![Atom {
                alpha: 4.0,
                weight: 1.0
            }],
            None
        )
        .is_err());
        assert!(SpectralMeasure::new(
            vec![Atom {
                alpha: 1.0,
                weight: 0.5
            }],
            None
        )
        .is_err());
        assert!(TabulatedDensity::new(vec![0.0, 1.0, 0.5, PI], vec![0.1; 4]).is_err());
    }

    #[test]
    fn density_is_even_exactly() {
        let d = DensitySpec::poisson(0.7).unwrap();
        for i in 0..100 {
            let x = -3.0 + 0.06 * i as f64;
            assert_eq!(d.eval(x), d.eval(-x));
        }
    }

    #[test]
    fn box_hypotheses() {
        let rep = hypothesis_report(&DensitySpec::box_density(PI / 2.0).unwrap(), 0.5, 1.0).unwrap();
        assert_eq!(rep.log_norm, f64::INFINITY);
        assert_eq!(rep.neg_moment, f64::INFINITY);
        assert_eq!(rep.applicable_theorems, vec![Theorem::NonUniversal]);
        assert!(
            (rep.besov_exponent_estimate - 1.0).abs() < 0.2,
            "{}",
            rep.besov_exponent_estimate
        );
    }

    #[test]
    fn poisson_hypotheses() {
        let r = 0.5;
        let d = DensitySpec::poisson(r).unwrap();
        let rep = hypothesis_report(&d, 0.5, 1.0).unwrap();
        // ψ >= (1 - r) / (2π (1 + r)) everywhere, so ∫ψ^{-1} is at most 2π over that minimum
        let floor = (1.0 - r) / (2.0 * PI * (1.0 + r));
        assert!(rep.neg_moment.is_finite());
        assert!(rep.neg_moment <= 2.0 * PI / floor);
        // oracle: ∫ 1/ψ = 2π/(1-r²) ∫ (1 - 2r cos x + r²) dx = 4π²(1+r²)/(1-r²)
        let exact = 4.0 * PI * PI * (1.0 + r * r) / (1.0 - r * r);
        assert!((rep.neg_moment - exact).abs() < 1e-8 * exact);
        assert!(rep.applicable_theorems.contains(&Theorem::AlmostSureUniversal));
        assert!(rep.applicable_theorems.contains(&Theorem::MeanUniversal));
        assert!((rep.besov_exponent_estimate - 2.0).abs() < 0.1);
    }

    #[test]
    fn raised_cosine_negative_moment_threshold() {
        let d = DensitySpec::raised_cosine_squared();
        let finite = hypothesis_report(&d, 0.5, 0.2).unwrap();
        assert!(finite.neg_moment.is_finite());
        assert!(finite.log_norm.is_finite());
        let infinite = hypothesis_report(&d, 0.5, 0.5).unwrap();
        assert_eq!(infinite.neg_moment, f64::INFINITY);
    }

    #[test]
    fn negative_moment_monotone_in_gamma() {
        let densities = [
            DensitySpec::raised_cosine_squared(),
            DensitySpec::poisson(0.9).unwrap(),
            DensitySpec::box_density(1.0).unwrap(),
            DensitySpec::uniform(),
        ];
        for d in &densities {
            let mut seen_infinite = false;
            for g in [0.05, 0.1, 0.2, 0.3, 0.5, 1.0, 2.0] {
                let rep = hypothesis_report(d, 0.5, g).unwrap();
                if seen_infinite {
                    assert_eq!(rep.neg_moment, f64::INFINITY, "{} gamma {g}", d.name());
                }
                seen_infinite |= rep.neg_moment.is_infinite();
            }
        }
    }

    #[test]
    fn mixed_measure_drops_almost_sure_law() {
        let m = SpectralMeasure::from_density(DensitySpec::constant_corr(0.3).unwrap()).unwrap();
        let rep = m.hypothesis_report(0.5, 1.0).unwrap().unwrap();
        assert_eq!(rep.applicable_theorems, vec![Theorem::MeanUniversal]);
    }
}
