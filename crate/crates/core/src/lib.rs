//! Random trigonometric polynomials with dependent stationary Gaussian
//! coefficients: spectral measures, Fejér-type kernels, Kac–Rice zero
//! densities, coefficient sampling, zero counting, and Salem–Zygmund checks.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
mod exec;
pub mod fourier;
pub mod kacrice;
pub mod kernels;
pub mod quad;
pub mod sampler;
pub mod spectral;
pub mod szclt;
pub mod zeros;

pub use error::{Error, Result};
pub use spectral::{
    correlation_of, hypothesis_report, nodal_measure, validate_psd, Atom, CorrelationSequence, DensityKind,
    DensitySpec, HypothesisReport, PsdReport, SpectralMeasure, TabulatedDensity, Theorem,
};
