//! Real zeros of `f_n(x) = (1/√n) Σ a_k cos kx + b_k sin kx`.
//!
//! Counting uses sign changes on an oversampled periodic grid with bisection
//! refinement and a tangency pass; the companion-matrix oracle finds the
//! unimodular roots of the algebraic polynomial `Q_n` with
//! `Q_n(e^{iθ}) = e^{inθ} √n f_n(θ)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::map_range;
use crate::fourier::complex_series_on_grid;
use crate::kernels::default_grid_size;
use crate::sampler::{mix_seed, CoefficientSample, CoefficientSampler};
use crate::spectral::SpectralMeasure;

/// Bisection steps per bracket.
pub const BISECTION_STEPS: usize = 60;
/// Grid values below this fraction of `max |f|` trigger the tangency pass.
pub const TANGENCY_THRESHOLD: f64 = 1e-6;
/// Cells whose Hermite-interpolated extremum comes within this fraction of
/// `h · max|f'|` at the cell ends are refined. Local, so quiet stretches of a
/// strongly inhomogeneous path are not refined wholesale; at 32×
/// oversampling the cubic interpolation error is ~1e-4 of that scale.
pub const REFINE_MARGIN: f64 = 1e-2;
/// Subdivision factor and depth of the tangency pass.
pub const SUBDIVISION: usize = 16;
pub const SUBDIVISION_DEPTH: usize = 3;
/// Roots closer than this are merged.
pub const MERGE_DISTANCE: f64 = 1e-10;
/// Largest degree accepted by the companion oracle.
pub const COMPANION_MAX_N: usize = 128;
/// Unit-circle filter for companion eigenvalues.
pub const UNIT_CIRCLE_TOLERANCE: f64 = 1e-6;
/// Tolerance of the `Q_n` consistency check.
pub const POLYNOMIAL_CHECK_TOLERANCE: f64 = 1e-9;
/// Degrees above this do not retain roots unless asked to.
pub const RETAIN_ROOTS_MAX_N: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMethod {
    GridBisection,
    Companion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCount {
    pub count: usize,
    /// Sorted roots, when retained.
    pub roots: Option<Vec<f64>>,
    /// Near-tangency cells that subdivision could not resolve.
    pub suspicious_cells: usize,
    pub method: CountMethod,
}

fn spectrum(sample: &CoefficientSample) -> Vec<Complex64> {
    let scale = 1.0 / (sample.n as f64).sqrt();
    std::iter::once(Complex64::new(0.0, 0.0))
        .chain(
            sample
                .a
                .iter()
                .zip(&sample.b)
                .map(|(&a, &b)| Complex64::new(a, -b) * scale),
        )
        .collect()
}

/// `f_n` at `x_j = offset + j 2π/m` by one inverse FFT.
pub fn evaluate_grid_with_offset(sample: &CoefficientSample, m: usize, offset: f64) -> Result<Vec<f64>> {
    check_grid(sample.n, m)?;
    Ok(complex_series_on_grid(&spectrum(sample), m, offset)
        .into_iter()
        .map(|c| c.re)
        .collect())
}

pub fn evaluate_grid(sample: &CoefficientSample, m: usize) -> Result<Vec<f64>> {
    evaluate_grid_with_offset(sample, m, 0.0)
}

/// `f_n'` on the same grid.
pub fn derivative_grid_with_offset(sample: &CoefficientSample, m: usize, offset: f64) -> Result<Vec<f64>> {
    check_grid(sample.n, m)?;
    let z: Vec<Complex64> = spectrum(sample)
        .into_iter()
        .enumerate()
        .map(|(k, c)| c * Complex64::new(0.0, k as f64))
        .collect();
    Ok(complex_series_on_grid(&z, m, offset)
        .into_iter()
        .map(|c| c.re)
        .collect())
}

fn check_grid(n: usize, m: usize) -> Result<()> {
    if !m.is_power_of_two() || m < 2 * n + 2 {
        return Err(Error::InvalidArgument(format!(
            "grid size {m} must be a power of two and at least 2n + 2 = {}",
            2 * n + 2
        )));
    }
    Ok(())
}

/// `(f_n(x), f_n'(x))` by direct summation.
pub fn evaluate_at(sample: &CoefficientSample, x: f64) -> (f64, f64) {
    let step = Complex64::from_polar(1.0, x);
    let mut rot = step;
    let (mut f, mut df) = (0.0, 0.0);
    for (i, (&a, &b)) in sample.a.iter().zip(&sample.b).enumerate() {
        let k = i + 1;
        if k % 64 == 0 {
            rot = Complex64::from_polar(1.0, k as f64 * x);
        }
        f += a * rot.re + b * rot.im;
        df += k as f64 * (b * rot.re - a * rot.im);
        rot *= step;
    }
    let scale = 1.0 / (sample.n as f64).sqrt();
    (f * scale, df * scale)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountOptions {
    pub retain_roots: bool,
}

impl CountOptions {
    pub fn for_degree(n: usize) -> Self {
        Self {
            retain_roots: n <= RETAIN_ROOTS_MAX_N,
        }
    }
}

fn bisect(sample: &CoefficientSample, mut lo: f64, mut hi: f64, mut f_lo: f64) -> f64 {
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let f_mid = evaluate_at(sample, mid).0;
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest `sign(f0) p(t)` over interior critical points of the cubic
/// Hermite interpolant `p` on a cell of width `h`; `None` if `p` is monotone.
fn hermite_extremum(f0: f64, d0: f64, f1: f64, d1: f64, h: f64) -> Option<f64> {
    let (m0, m1) = (d0 * h, d1 * h);
    let a = 2.0 * f0 + m0 - 2.0 * f1 + m1;
    let b = -3.0 * f0 - 2.0 * m0 + 3.0 * f1 - m1;
    let p = |t: f64| ((a * t + b) * t + m0) * t + f0;
    // p'(t) = 3a t² + 2b t + m0
    let (qa, qb, qc) = (3.0 * a, 2.0 * b, m0);
    let mut critical = Vec::with_capacity(2);
    if qa.abs() <= 1e-14 * (qb.abs() + qc.abs()) {
        if qb != 0.0 {
            critical.push(-qc / qb);
        }
    } else {
        let disc = qb * qb - 4.0 * qa * qc;
        if disc >= 0.0 {
            let q = -0.5 * (qb + qb.signum() * disc.sqrt());
            critical.push(q / qa);
            if q != 0.0 {
                critical.push(qc / q);
            }
        }
    }
    critical
        .into_iter()
        .filter(|t| *t > 0.0 && *t < 1.0)
        .map(|t| f0.signum() * p(t))
        .min_by(f64::total_cmp)
}

enum CellKind {
    Root(f64, f64),
    Exact(f64),
    Quiet,
    Refine,
}

fn classify(x0: f64, (f0, d0): (f64, f64), x1: f64, (f1, d1): (f64, f64), scale: f64) -> CellKind {
    if f0 == 0.0 {
        return CellKind::Exact(x0);
    }
    if f0 * f1 < 0.0 {
        return CellKind::Root(x0, x1);
    }
    let tangent = f0.abs().min(f1.abs()) < TANGENCY_THRESHOLD * scale && d0 * d1 < 0.0;
    match hermite_extremum(f0, d0, f1, d1, x1 - x0) {
        Some(e) if e < REFINE_MARGIN * (x1 - x0) * d0.abs().max(d1.abs()) => CellKind::Refine,
        _ if tangent => CellKind::Refine,
        _ => CellKind::Quiet,
    }
}

struct CellScan {
    roots: Vec<(f64, f64)>,
    resolved: bool,
}

/// Looks for sign changes inside a cell whose interpolant dips towards zero
/// by repeated ×16 subdivision; returns brackets found, or `resolved = false`
/// if a crossing or tangency signature persists at full depth.
fn subdivide(sample: &CoefficientSample, lo: f64, hi: f64, scale: f64, depth: usize) -> CellScan {
    let h = (hi - lo) / SUBDIVISION as f64;
    let pts: Vec<(f64, (f64, f64))> = (0..=SUBDIVISION)
        .map(|i| {
            let x = if i == SUBDIVISION { hi } else { lo + i as f64 * h };
            (x, evaluate_at(sample, x))
        })
        .collect();
    let mut roots = Vec::new();
    let mut resolved = true;
    for w in pts.windows(2) {
        let (x0, v0) = w[0];
        let (x1, v1) = w[1];
        match classify(x0, v0, x1, v1, scale) {
            CellKind::Exact(x) => roots.push((x, x)),
            CellKind::Root(a, b) => roots.push((a, b)),
            CellKind::Quiet => {}
            CellKind::Refine if depth + 1 < SUBDIVISION_DEPTH => {
                let inner = subdivide(sample, x0, x1, scale, depth + 1);
                roots.extend(inner.roots);
                resolved &= inner.resolved;
            }
            CellKind::Refine => {
                let crossing = hermite_extremum(v0.0, v0.1, v1.0, v1.1, x1 - x0).is_some_and(|e| e < 0.0);
                let tangent = v0.0.abs().min(v1.0.abs()) < TANGENCY_THRESHOLD * scale && v0.1 * v1.1 < 0.0;
                if crossing || tangent {
                    resolved = false;
                }
            }
        }
    }
    CellScan { roots, resolved }
}

/// Zeros in `[a, b)`, with `b - a <= 2π`.
pub fn count_zeros(sample: &CoefficientSample, a: f64, b: f64) -> Result<ZeroCount> {
    count_zeros_with(sample, a, b, CountOptions::for_degree(sample.n))
}

pub fn count_zeros_with(sample: &CoefficientSample, a: f64, b: f64, options: CountOptions) -> Result<ZeroCount> {
    if !(b > a) || b - a > 2.0 * PI + 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "interval [{a}, {b}) must have length in (0, 2π]"
        )));
    }
    let n = sample.n;
    let m = default_grid_size(n);
    let h = 2.0 * PI / m as f64;
    let full = (b - a - 2.0 * PI).abs() <= 1e-12;
    let values = evaluate_grid_with_offset(sample, m, a)?;
    let derivs = derivative_grid_with_offset(sample, m, a)?;
    let scale = values.iter().fold(0.0f64, |s, v| s.max(v.abs()));

    // cells [p_j, p_{j+1}) for j < cells, the last one ending at b
    let cells = if full {
        m
    } else {
        (((b - a) / h).ceil() as usize).clamp(1, m)
    };
    let end = if full {
        (values[0], derivs[0])
    } else {
        evaluate_at(sample, b)
    };
    let point = |j: usize| -> (f64, f64, f64) {
        if j == cells {
            (if full { a + 2.0 * PI } else { b }, end.0, end.1)
        } else {
            (a + j as f64 * h, values[j], derivs[j])
        }
    };

    let mut brackets: Vec<(f64, f64, f64)> = Vec::new();
    let mut exact: Vec<f64> = Vec::new();
    let mut suspicious = 0;
    for j in 0..cells {
        let (x0, f0, d0) = point(j);
        let (x1, f1, d1) = point(j + 1);
        match classify(x0, (f0, d0), x1, (f1, d1), scale) {
            CellKind::Exact(x) => exact.push(x),
            CellKind::Root(lo, hi) => brackets.push((lo, hi, f0)),
            CellKind::Quiet => {}
            CellKind::Refine => {
                let scan = subdivide(sample, x0, x1, scale, 0);
                if !scan.resolved {
                    suspicious += 1;
                }
                for (lo, hi) in scan.roots {
                    if lo == hi {
                        exact.push(lo);
                    } else {
                        brackets.push((lo, hi, evaluate_at(sample, lo).0));
                    }
                }
            }
        }
    }
    let count = exact.len() + brackets.len();
    if !options.retain_roots {
        return Ok(ZeroCount {
            count,
            roots: None,
            suspicious_cells: suspicious,
            method: CountMethod::GridBisection,
        });
    }
    let refined = map_range(brackets.len(), |i| {
        let (lo, hi, f_lo) = brackets[i];
        bisect(sample, lo, hi, f_lo)
    });
    let mut roots: Vec<f64> = exact.into_iter().chain(refined).collect();
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|x, y| (*x - *y).abs() < MERGE_DISTANCE);
    Ok(ZeroCount {
        count: roots.len(),
        roots: Some(roots),
        suspicious_cells: suspicious,
        method: CountMethod::GridBisection,
    })
}

/// Coefficients `c_0..c_{2n}` of `Q_n(z) = Σ c_p z^p`: `c_{n+k} = (a_k - i b_k)/2`,
/// `c_{n-k} = (a_k + i b_k)/2`, `c_n = 0`.
pub fn algebraic_coefficients(sample: &CoefficientSample) -> Vec<Complex64> {
    let n = sample.n;
    let mut c = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
    for k in 1..=n {
        let (a, b) = (sample.a[k - 1], sample.b[k - 1]);
        c[n + k] = Complex64::new(0.5 * a, -0.5 * b);
        c[n - k] = Complex64::new(0.5 * a, 0.5 * b);
    }
    c
}

fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &v| acc * z + v)
}

/// Largest `|Q_n(e^{iθ}) - e^{inθ} √n f_n(θ)|` over `points` equispaced angles.
pub fn polynomial_identity_error(sample: &CoefficientSample, points: usize) -> (f64, f64) {
    let c = algebraic_coefficients(sample);
    let n = sample.n as f64;
    (0..points)
        .map(|j| {
            let theta = 2.0 * PI * (j as f64 + 0.25) / points as f64;
            let z = Complex64::from_polar(1.0, theta);
            let lhs = horner(&c, z);
            let rhs = Complex64::from_polar(1.0, n * theta) * (n.sqrt() * evaluate_at(sample, theta).0);
            (theta, (lhs - rhs).norm())
        })
        .fold((0.0, 0.0), |acc, v| if v.1 > acc.1 { v } else { acc })
}

/// Zeros on the circle from the eigenvalues of the companion matrix of `Q_n`.
pub fn companion_oracle(sample: &CoefficientSample) -> Result<ZeroCount> {
    let n = sample.n;
    if n > COMPANION_MAX_N {
        return Err(Error::InvalidArgument(format!(
            "companion oracle is limited to n <= {COMPANION_MAX_N}, got {n}"
        )));
    }
    let (theta, error) = polynomial_identity_error(sample, 4 * n + 8);
    if error > POLYNOMIAL_CHECK_TOLERANCE {
        return Err(Error::PolynomialMismatch { theta, error });
    }
    let c = algebraic_coefficients(sample);
    let degree = 2 * n;
    let lead = c[degree];
    if lead.norm() < 1e-13 {
        return Err(Error::DegenerateLeadingCoefficient { magnitude: lead.norm() });
    }
    let mut companion = DMatrix::<Complex64>::zeros(degree, degree);
    for i in 1..degree {
        companion[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..degree {
        companion[(i, degree - 1)] = -c[i] / lead;
    }
    let schur = nalgebra::Schur::try_new(companion, 1e-15, 100_000).ok_or(Error::EigenSolveFailed)?;
    let (_, t) = schur.unpack();
    let mut roots: Vec<f64> = (0..degree)
        .map(|i| t[(i, i)])
        .filter(|z| (z.norm() - 1.0).abs() < UNIT_CIRCLE_TOLERANCE)
        .map(|z| z.arg().rem_euclid(2.0 * PI))
        .collect();
    roots.sort_by(f64::total_cmp);
    Ok(ZeroCount {
        count: roots.len(),
        roots: Some(roots),
        suspicious_cells: 0,
        method: CountMethod::Companion,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRow {
    pub replicate: usize,
    /// Child seed of the replicate's `a` stream.
    pub seed: u64,
    pub count: usize,
    pub ratio: f64,
    pub suspicious: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroStatistics {
    pub n: usize,
    pub replicates: usize,
    pub master_seed: u64,
    pub mean_ratio: f64,
    pub variance: f64,
    pub se: f64,
    pub rows: Vec<ReplicateRow>,
}

/// Monte Carlo count over streams `0..replicates`.
pub fn zero_statistics(
    measure: &SpectralMeasure,
    n: usize,
    replicates: usize,
    master_seed: u64,
) -> Result<ZeroStatistics> {
    let sampler = CoefficientSampler::new(measure, n)?;
    zero_statistics_with(&sampler, replicates, master_seed)
}

pub fn zero_statistics_with(
    sampler: &CoefficientSampler,
    replicates: usize,
    master_seed: u64,
) -> Result<ZeroStatistics> {
    if replicates < 2 {
        return Err(Error::InvalidArgument("at least two replicates are required".into()));
    }
    let n = sampler.n();
    let options = CountOptions { retain_roots: false };
    let rows = map_range(replicates, |r| -> Result<ReplicateRow> {
        let sample = sampler.sample(master_seed, r as u64);
        let zc = count_zeros_with(&sample, 0.0, 2.0 * PI, options).map_err(|e| Error::Replicate {
            replicate: r,
            source: Box::new(e),
        })?;
        Ok(ReplicateRow {
            replicate: r,
            seed: mix_seed(master_seed, 2 * r as u64),
            count: zc.count,
            ratio: zc.count as f64 / n as f64,
            suspicious: zc.suspicious_cells,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let k = rows.len() as f64;
    let mean = rows.iter().map(|r| r.ratio).sum::<f64>() / k;
    let variance = rows.iter().map(|r| (r.ratio - mean).powi(2)).sum::<f64>() / (k - 1.0);
    Ok(ZeroStatistics {
        n,
        replicates,
        master_seed,
        mean_ratio: mean,
        variance,
        se: (variance / k).sqrt(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::DensitySpec;
    use approx::assert_abs_diff_eq;

    fn sample(a: Vec<f64>, b: Vec<f64>) -> CoefficientSample {
        CoefficientSample::from_coefficients(a, b).unwrap()
    }

    #[test]
    fn cosine_grid() {
        let s = sample(vec![1.0], vec![0.0]);
        let g = evaluate_grid(&s, 64).unwrap();
        for (j, v) in g.iter().enumerate() {
            assert_abs_diff_eq!(*v, (2.0 * PI * j as f64 / 64.0).cos(), epsilon = 1e-12);
        }
    }

    #[test]
    fn sine_grid_with_scaling() {
        let s = sample(vec![0.0, 0.0], vec![2f64.sqrt(), 0.0]);
        let g = evaluate_grid(&s, 64).unwrap();
        for (j, v) in g.iter().enumerate() {
            assert_abs_diff_eq!(*v, (2.0 * PI * j as f64 / 64.0).sin(), epsilon = 1e-12);
        }
    }

    #[test]
    fn grid_matches_direct_sum() {
        let m = SpectralMeasure::from_density(DensitySpec::poisson(0.5).unwrap()).unwrap();
        let s = crate::sampler::sample_coefficients(&m, 64, 5, 0).unwrap();
        let g = evaluate_grid(&s, 256).unwrap();
        let d = derivative_grid_with_offset(&s, 256, 0.0).unwrap();
        for j in 0..256 {
            let x = 2.0 * PI * j as f64 / 256.0;
            let direct: f64 = (1..=64)
                .map(|k| s.a[k - 1] * (k as f64 * x).cos() + s.b[k - 1] * (k as f64 * x).sin())
                .sum::<f64>()
                / 8.0;
            assert!((g[j] - direct).abs() < 1e-10);
            let (f, df) = evaluate_at(&s, x);
            assert!((f - direct).abs() < 1e-10);
            assert!((df - d[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn cosine_roots() {
        let s = sample(vec![1.0], vec![0.0]);
        let z = count_zeros(&s, 0.0, 2.0 * PI).unwrap();
        assert_eq!(z.count, 2);
        let r = z.roots.unwrap();
        assert_abs_diff_eq!(r[0], PI / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r[1], 1.5 * PI, epsilon = 1e-12);
    }

    #[test]
    fn sine_roots_include_grid_point() {
        let s = sample(vec![0.0], vec![1.0]);
        let z = count_zeros(&s, 0.0, 2.0 * PI).unwrap();
        assert_eq!(z.count, 2);
        let r = z.roots.unwrap();
        assert_abs_diff_eq!(r[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r[1], PI, epsilon = 1e-12);
    }

    #[test]
    fn companion_small_cases() {
        let c = companion_oracle(&sample(vec![1.0], vec![0.0])).unwrap();
        let r = c.roots.unwrap();
        assert_eq!(r.len(), 2);
        assert_abs_diff_eq!(r[0], PI / 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r[1], 1.5 * PI, epsilon = 1e-9);
        let s = companion_oracle(&sample(vec![0.0], vec![1.0])).unwrap();
        let r = s.roots.unwrap();
        assert_eq!(r.len(), 2);
        assert!(r[0].min(2.0 * PI - r[0]) < 1e-9 || r[1].min(2.0 * PI - r[1]) < 1e-9);
        assert!(r.iter().any(|x| (x - PI).abs() < 1e-9));
    }

    #[test]
    fn degenerate_leading_coefficient() {
        let s = sample(vec![1.0, 0.0], vec![0.0, 0.0]);
        assert!(matches!(
            companion_oracle(&s),
            Err(Error::DegenerateLeadingCoefficient { .. })
        ));
    }

    #[test]
    fn companion_agrees_with_grid() {
        let m = SpectralMeasure::from_density(DensitySpec::box_density(1.0).unwrap()).unwrap();
        let sampler = CoefficientSampler::new(&m, 16).unwrap();
        for stream in 0..10 {
            let s = sampler.sample(99, stream);
            let g = count_zeros(&s, 0.0, 2.0 * PI).unwrap();
            let c = companion_oracle(&s).unwrap();
            assert_eq!(g.count, c.count);
            let (gr, cr) = (g.roots.unwrap(), c.roots.unwrap());
            for (x, y) in gr.iter().zip(&cr) {
                assert!((x - y).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn shifted_interval_same_count() {
        let sampler = CoefficientSampler::new(&SpectralMeasure::uniform(), 40).unwrap();
        for stream in 0..5 {
            let s = sampler.sample(1, stream);
            let base = count_zeros(&s, 0.0, 2.0 * PI).unwrap().count;
            let c = 0.1 + stream as f64;
            assert_eq!(count_zeros(&s, c, c + 2.0 * PI).unwrap().count, base);
        }
    }

    #[test]
    fn sub_intervals_partition_the_circle() {
        let sampler = CoefficientSampler::new(&SpectralMeasure::uniform(), 30).unwrap();
        let s = sampler.sample(2, 0);
        let total = count_zeros(&s, 0.0, 2.0 * PI).unwrap().count;
        let parts = count_zeros(&s, 0.0, 1.0).unwrap().count
            + count_zeros(&s, 1.0, 4.0).unwrap().count
            + count_zeros(&s, 4.0, 2.0 * PI).unwrap().count;
        assert_eq!(total, parts);
    }

    #[test]
    fn tangency_is_flagged() {
        // cos x - cos 2x has a double zero at 0 and simple zeros at ±2π/3
        let s = sample(vec![1.0, -1.0], vec![0.0, 0.0]);
        let z = count_zeros(&s, -1.0, 2.0 * PI - 1.0).unwrap();
        assert_eq!(z.suspicious_cells, 1);
        let roots = z.roots.unwrap();
        assert_eq!(roots.len(), 2);
        assert_abs_diff_eq!(roots[0], 2.0 * PI / 3.0, epsilon = 1e-9);
        assert_abs_diff_eq!(roots[1], 4.0 * PI / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn close_pair_is_resolved_by_subdivision() {
        // cos x - cos 2x - δ cos 3x ≈ 1.5 x² - δ near 0: two zeros 4e-4 apart,
        // inside one grid cell
        let delta = 1.5 * 2e-4f64.powi(2);
        let s = sample(vec![1.0, -1.0, -delta], vec![0.0, 0.0, 0.0]);
        let z = count_zeros(&s, -1.0, 2.0 * PI - 1.0).unwrap();
        assert_eq!(z.suspicious_cells, 0);
        assert_eq!(z.count, 4);
        let roots = z.roots.unwrap();
        assert!(roots.iter().any(|x| (x - 2e-4).abs() < 1e-6));
        assert!(roots.iter().any(|x| (x + 2e-4).abs() < 1e-6));
        assert_eq!(companion_oracle(&s).unwrap().count, 4);
    }

    #[test]
    fn statistics_are_deterministic() {
        let m = SpectralMeasure::uniform();
        let a = zero_statistics(&m, 32, 8, 42).unwrap();
        let b = zero_statistics(&m, 32, 8, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.rows.iter().all(|r| r.count <= 64));
    }
}
