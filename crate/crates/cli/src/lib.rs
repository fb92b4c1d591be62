//! Scenario runner for random trigonometric polynomial experiments: reads
//! TOML scenarios, sweeps degrees, runs Monte Carlo zero counts and the
//! Salem–Zygmund checks, and writes reproducible CSV/JSON artifacts plus a
//! manifest that `report` turns into pass/fail verdicts.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod expr;
pub mod measure;
pub mod output;
pub mod report;
pub mod run;

pub use config::{ScenarioConfig, Task};
pub use error::{CliError, Result};
pub use measure::MeasureDecl;
pub use report::{compare_report, Verdict, VerdictTable};
pub use run::{run_scenario, RunManifest};

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "TRIGZERO_THREADS";

/// Sizes the global thread pool from `TRIGZERO_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::config(THREADS_ENV, format!("expected a positive integer, got '{value}'")))?;
    // A pool may already exist (tests); the cap then does not apply.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    Ok(())
}
