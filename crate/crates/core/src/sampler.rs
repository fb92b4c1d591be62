//! Exact Gaussian sampling of the coefficient sequences `(a_k)` and `(b_k)`.
//!
//! The spectral measure splits into atoms and a density, sampled
//! independently and summed. An atom `(α, w)` contributes
//! `√w (ξ cos kα + η sin kα)`, whose correlation is `w cos(kα)`. The density
//! part uses circulant embedding of its Toeplitz covariance, with a pivoted
//! Cholesky factorization when no nonnegative embedding is found.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::map_range;
use crate::fourier::next_pow2;
use crate::spectral::{Atom, CorrelationSequence, SpectralMeasure};

/// Negative eigenvalues up to this fraction of the largest one are clipped.
pub const CLIP_TOLERANCE: f64 = 1e-8;
/// Largest circulant tried before giving up on the embedding.
pub const EMBEDDING_CAP: usize = 1 << 24;
/// Largest degree handled by the dense fallback.
pub const CHOLESKY_MAX_N: usize = 4096;
/// Pivoted Cholesky stops once every remaining diagonal entry is below this
/// fraction of the variance.
pub const CHOLESKY_TOLERANCE: f64 = 1e-10;

/// SplitMix64 finalizer.
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed of `(master_seed, stream)`.
pub fn mix_seed(master_seed: u64, stream: u64) -> u64 {
    splitmix(splitmix(master_seed) ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

fn stream_rng(master_seed: u64, substream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(mix_seed(master_seed, substream))
}

/// One realization of `(a_1..a_n)` and `(b_1..b_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSample {
    pub n: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub master_seed: u64,
    pub stream_id: u64,
}

impl CoefficientSample {
    /// Builds a sample from explicit coefficients (stream lineage zeroed).
    pub fn from_coefficients(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() || a.is_empty() {
            return Err(Error::InvalidArgument(
                "a and b must be nonempty and of equal length".into(),
            ));
        }
        if a.iter().chain(&b).any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("coefficients must be finite".into()));
        }
        Ok(Self {
            n: a.len(),
            a,
            b,
            master_seed: 0,
            stream_id: 0,
        })
    }

    /// `(1/2n) Σ (a_k² + b_k²)`.
    pub fn birkhoff_average(&self) -> f64 {
        self.a.iter().chain(&self.b).map(|v| v * v).sum::<f64>() / (2.0 * self.n as f64)
    }
}

/// Circulant embedding of a Toeplitz covariance of order `target_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingPlan {
    pub target_n: usize,
    pub embedding_size: usize,
    /// Circulant eigenvalues after clipping, all `>= 0`.
    pub circulant_eigenvalues: Vec<f64>,
    /// Magnitude of the most negative eigenvalue that was clipped to 0.
    pub clip_magnitude: f64,
}

impl EmbeddingPlan {
    /// Covariance at lag `k` reproduced by the clipped spectrum.
    pub fn reconstructed_covariance(&self, max_lag: usize) -> Vec<f64> {
        let size = self.embedding_size;
        let mut buf: Vec<Complex64> = self
            .circulant_eigenvalues
            .iter()
            .map(|&l| Complex64::new(l / size as f64, 0.0))
            .collect();
        FftPlanner::new().plan_fft_inverse(size).process(&mut buf);
        buf.iter().take(max_lag + 1).map(|c| c.re).collect()
    }

    /// One Gaussian vector of length `target_n` with the embedded covariance.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let size = self.embedding_size;
        let scale = 1.0 / size as f64;
        let mut buf: Vec<Complex64> = self
            .circulant_eigenvalues
            .iter()
            .map(|&l| {
                let re: f64 = rng.sample(StandardNormal);
                let im: f64 = rng.sample(StandardNormal);
                Complex64::new(re, im) * (l * scale).sqrt()
            })
            .collect();
        FftPlanner::new().plan_fft_forward(size).process(&mut buf);
        buf.into_iter().take(self.target_n).map(|c| c.re).collect()
    }
}

struct EmbeddingAttempt {
    eigenvalues: Vec<f64>,
    min: f64,
    max: f64,
}

fn circulant_spectrum(cov: &dyn Fn(usize) -> f64, half: usize) -> EmbeddingAttempt {
    let size = 2 * half;
    let mut row = vec![Complex64::new(0.0, 0.0); size];
    for (j, slot) in row.iter_mut().enumerate().take(half + 1) {
        *slot = Complex64::new(cov(j), 0.0);
    }
    for j in 1..half {
        row[size - j] = row[j];
    }
    FftPlanner::new().plan_fft_forward(size).process(&mut row);
    let eigenvalues: Vec<f64> = row.into_iter().map(|c| c.re).collect();
    let min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let max = eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    EmbeddingAttempt { eigenvalues, min, max }
}

/// Embeds the covariance `cov(k)` of a stationary sequence of length `n`,
/// starting from half-size `next_pow2(2n)` and doubling while the most
/// negative eigenvalue exceeds the clip tolerance. Doubling stops at the cap
/// or once two doublings fail to halve the relative negative part.
pub fn build_embedding_with(cov: &dyn Fn(usize) -> f64, n: usize, cap: usize) -> Result<EmbeddingPlan> {
    if n == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    let mut half = next_pow2(2 * n);
    let mut history: Vec<f64> = Vec::new();
    loop {
        let attempt = circulant_spectrum(cov, half);
        let relative = attempt.min / attempt.max;
        if attempt.max > 0.0 && relative >= -CLIP_TOLERANCE {
            let clip_magnitude = (-attempt.min).max(0.0);
            return Ok(EmbeddingPlan {
                target_n: n,
                embedding_size: 2 * half,
                circulant_eigenvalues: attempt.eigenvalues.into_iter().map(|l| l.max(0.0)).collect(),
                clip_magnitude,
            });
        }
        history.push(relative.abs());
        let stagnant = history.len() >= 3 && {
            let k = history.len();
            history[k - 1] > 0.5 * history[k - 3]
        };
        if 4 * half > cap || stagnant {
            return Err(Error::EmbeddingFailed {
                size: 2 * half,
                min_eigenvalue: attempt.min,
                n,
            });
        }
        half *= 2;
    }
}

/// Embedding of a correlation sequence; lags beyond the stored range are
/// taken as zero.
pub fn build_embedding(rho: &CorrelationSequence, n: usize) -> Result<EmbeddingPlan> {
    rho.require_lag(n)?;
    build_embedding_with(&|k| rho.at(k as i64), n, EMBEDDING_CAP)
}

/// Low-rank factor `L` with `T ≈ L Lᵀ`, stored by rows.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    pub n: usize,
    pub rank: usize,
    rows: Vec<Vec<f64>>,
}

impl CholeskyFactor {
    /// Pivoted Cholesky of the Toeplitz matrix `T_{ij} = cov(|i - j|)`.
    pub fn toeplitz(cov: &[f64], n: usize) -> Result<Self> {
        if cov.len() < n {
            return Err(Error::InsufficientLags {
                required: n.saturating_sub(1),
                available: cov.len().saturating_sub(1),
            });
        }
        let tol = CHOLESKY_TOLERANCE * cov[0].abs();
        let mut diag = vec![cov[0]; n];
        let mut used = vec![false; n];
        let mut rows: Vec<Vec<f64>> = vec![Vec::new(); n];
        let mut rank = 0;
        while rank < n {
            let (p, dp) = diag.iter().enumerate().filter(|(i, _)| !used[*i]).fold(
                (usize::MAX, f64::NEG_INFINITY),
                |acc, (i, &d)| if d > acc.1 { (i, d) } else { acc },
            );
            if p == usize::MAX || dp <= tol {
                break;
            }
            let pivot = dp.sqrt();
            let prow = rows[p].clone();
            let column = map_range(n, |i| {
                if used[i] {
                    return 0.0;
                }
                if i == p {
                    return pivot;
                }
                let dot: f64 = rows[i].iter().zip(&prow).map(|(x, y)| x * y).sum();
                (cov[i.abs_diff(p)] - dot) / pivot
            });
            for (i, v) in column.into_iter().enumerate() {
                rows[i].push(v);
                if !used[i] {
                    diag[i] -= v * v;
                }
            }
            used[p] = true;
            rank += 1;
        }
        Ok(Self { n, rank, rows })
    }

    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        self.rows[i].iter().zip(&self.rows[j]).map(|(x, y)| x * y).sum()
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let xi: Vec<f64> = (0..self.rank).map(|_| rng.sample(StandardNormal)).collect();
        self.rows
            .iter()
            .map(|row| row.iter().zip(&xi).map(|(l, z)| l * z).sum())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DensityPlan {
    Circulant(EmbeddingPlan),
    Cholesky(CholeskyFactor),
}

/// Sampler for a fixed measure and degree; the embedding is built once and
/// reused across streams.
#[derive(Debug, Clone)]
pub struct CoefficientSampler {
    n: usize,
    atoms: Vec<Atom>,
    density: Option<DensityPlan>,
}

impl CoefficientSampler {
    pub fn new(measure: &SpectralMeasure, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("degree must be positive".into()));
        }
        let density = match measure.density() {
            None => None,
            Some(d) => {
                let plan = if d.has_closed_form() {
                    build_embedding_with(&|k| d.closed_form_fourier(k).unwrap_or(0.0), n, EMBEDDING_CAP)
                } else {
                    let cov = d.fourier_sequence(n)?;
                    build_embedding_with(&|k| cov.get(k).copied().unwrap_or(0.0), n, EMBEDDING_CAP)
                };
                Some(match plan {
                    Ok(p) => DensityPlan::Circulant(p),
                    Err(Error::EmbeddingFailed {
                        size, min_eigenvalue, ..
                    }) => {
                        if n > CHOLESKY_MAX_N {
                            return Err(Error::EmbeddingFailed {
                                size,
                                min_eigenvalue,
                                n,
                            });
                        }
                        let cov = d.fourier_sequence(n)?;
                        DensityPlan::Cholesky(CholeskyFactor::toeplitz(&cov, n)?)
                    }
                    Err(e) => return Err(e),
                })
            }
        };
        Ok(Self {
            n,
            atoms: measure.atoms().to_vec(),
            density,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn density_plan(&self) -> Option<&DensityPlan> {
        self.density.as_ref()
    }

    fn sequence(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mut out = match &self.density {
            Some(DensityPlan::Circulant(p)) => p.sample(rng),
            Some(DensityPlan::Cholesky(c)) => c.sample(rng),
            None => vec![0.0; self.n],
        };
        for atom in &self.atoms {
            let xi: f64 = rng.sample(StandardNormal);
            let eta: f64 = rng.sample(StandardNormal);
            let s = atom.weight.sqrt();
            for (k, v) in out.iter_mut().enumerate() {
                let (sin, cos) = ((k + 1) as f64 * atom.alpha).sin_cos();
                *v += s * (xi * cos + eta * sin);
            }
        }
        out
    }

    /// Sample for `(master_seed, stream_id)`; `a` draws from substream
    /// `2 stream_id`, `b` from `2 stream_id + 1`.
    pub fn sample(&self, master_seed: u64, stream_id: u64) -> CoefficientSample {
        let mut rng_a = stream_rng(master_seed, stream_id.wrapping_mul(2));
        let mut rng_b = stream_rng(master_seed, stream_id.wrapping_mul(2).wrapping_add(1));
        CoefficientSample {
            n: self.n,
            a: self.sequence(&mut rng_a),
            b: self.sequence(&mut rng_b),
            master_seed,
            stream_id,
        }
    }

    /// Samples for streams `0..count`, in stream order.
    pub fn sample_many(&self, master_seed: u64, count: usize) -> Vec<CoefficientSample> {
        map_range(count, |s| self.sample(master_seed, s as u64))
    }
}

pub fn sample_coefficients(
    measure: &SpectralMeasure,
    n: usize,
    master_seed: u64,
    stream_id: u64,
) -> Result<CoefficientSample> {
    Ok(CoefficientSampler::new(measure, n)?.sample(master_seed, stream_id))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagCheck {
    pub lag: usize,
    pub estimate: f64,
    pub expected: f64,
    pub standard_error: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub lags: Vec<LagCheck>,
    pub pass: bool,
}

fn lag_product(x: &[f64], y: &[f64], k: usize) -> f64 {
    let len = x.len() - k;
    x[..len].iter().zip(&y[k..]).map(|(u, v)| u * v).sum::<f64>() / len as f64
}

fn pooled_report(estimates: &[Vec<f64>], expected: &dyn Fn(usize) -> f64, max_lag: usize) -> CovarianceReport {
    let count = estimates.len() as f64;
    let lags: Vec<LagCheck> = (0..=max_lag)
        .map(|k| {
            let mean = estimates.iter().map(|e| e[k]).sum::<f64>() / count;
            let var = estimates.iter().map(|e| (e[k] - mean).powi(2)).sum::<f64>() / (count - 1.0);
            let se = (var / count).sqrt();
            let exp = expected(k);
            LagCheck {
                lag: k,
                estimate: mean,
                expected: exp,
                standard_error: se,
                pass: (mean - exp).abs() < 4.0 * se,
            }
        })
        .collect();
    let pass = lags.iter().all(|l| l.pass);
    CovarianceReport { lags, pass }
}

fn check_samples(samples: &[CoefficientSample], max_lag: usize) -> Result<()> {
    if samples.len() < 50 {
        return Err(Error::InvalidArgument(format!(
            "covariance checks need at least 50 samples, got {}",
            samples.len()
        )));
    }
    if samples.iter().any(|s| s.n <= max_lag) {
        return Err(Error::InvalidArgument("max_lag must be below the degree".into()));
    }
    Ok(())
}

/// Pooled empirical autocorrelation of the `a` and `b` sequences against
/// `ρ`, with standard errors from the spread of per-sequence estimates.
pub fn covariance_check(
    samples: &[CoefficientSample],
    rho: &CorrelationSequence,
    max_lag: usize,
) -> Result<CovarianceReport> {
    check_samples(samples, max_lag)?;
    rho.require_lag(max_lag)?;
    let estimates: Vec<Vec<f64>> = samples
        .iter()
        .flat_map(|s| [&s.a, &s.b])
        .map(|x| (0..=max_lag).map(|k| lag_product(x, x, k)).collect())
        .collect();
    Ok(pooled_report(&estimates, &|k| rho.get(k), max_lag))
}

/// Pooled cross-correlation `E[a_j b_{j+k}]` against 0.
pub fn cross_covariance_check(samples: &[CoefficientSample], max_lag: usize) -> Result<CovarianceReport> {
    check_samples(samples, max_lag)?;
    let estimates: Vec<Vec<f64>> = samples
        .iter()
        .map(|s| (0..=max_lag).map(|k| lag_product(&s.a, &s.b, k)).collect())
        .collect();
    Ok(pooled_report(&estimates, &|_| 0.0, max_lag))
}
