//! Scenario execution: runs each task, writes its artifacts, and records a
//! manifest next to them.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use trigzero::kacrice::{expected_zero_ratio, integrand_profile, predicted_limit, Regime};
use trigzero::kernels::default_grid_size;
use trigzero::sampler::{covariance_check, cross_covariance_check, CoefficientSampler};
use trigzero::szclt::{
    cf_distance, conditional_cf, default_t_grid, empirical_cf, limit_cf, localized_variance, CharFunctionCurve,
};
use trigzero::zeros::zero_statistics_with;
use trigzero::{nodal_measure, validate_psd, CorrelationSequence, DensityKind, SpectralMeasure};

use crate::config::{ScenarioConfig, Task};
use crate::error::{CliError, Result};
use crate::measure::resolve;
use crate::output::{self, json_num, num, opt_num, write_csv, write_json};

pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";
pub const DEFAULT_ETA: f64 = 0.5;
pub const DEFAULT_GAMMA: f64 = 0.1;
pub const DEFAULT_X0: f64 = 1.0;

/// `(t_p, λ_p)` configurations for the localized covariance check.
pub const LOCALIZED_CONFIGS: [(&[f64], &[f64]); 3] = [
    (&[0.0, 1.0], &[1.0, -1.0]),
    (&[0.0, PI], &[1.0, 1.0]),
    (&[0.0, 0.5, 2.0], &[1.0, 2.0, -1.0]),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputEntry {
    /// Relative to the manifest's directory.
    pub path: String,
    pub schema: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub task: Task,
    pub status: TaskStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub outputs: Vec<OutputEntry>,
    pub wall_clock_seconds: f64,
}

/// What theory says the zero ratio should do for this measure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub regime: Regime,
    pub limit: Option<f64>,
    /// `ρ = δ_0`, where every degree has a closed-form ratio.
    pub independent: bool,
    /// The limit came from the scenario's `predicted_limit`.
    pub overridden: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool_version: String,
    pub scenario: String,
    pub config_hash: String,
    pub config: ScenarioConfig,
    pub prediction: Prediction,
    pub created_unix: u64,
    pub total_wall_clock_seconds: f64,
    /// CSV headers by schema name.
    pub schemas: BTreeMap<String, String>,
    pub tasks: Vec<TaskRecord>,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::parse(path, e))
    }

    pub fn task(&self, task: Task) -> Option<&TaskRecord> {
        self.tasks.iter().find(|r| r.task == task)
    }
}

fn schemas() -> BTreeMap<String, String> {
    [
        ("kacrice_sweep", &output::KACRICE_SWEEP_HEADER[..]),
        ("integrand_profile", &output::INTEGRAND_HEADER[..]),
        ("zero_mc", &output::ZERO_MC_HEADER[..]),
        ("cf_curve", &output::CF_HEADER[..]),
        ("samples", &output::SAMPLES_HEADER[..]),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v.join(",")))
    .collect()
}

pub fn prediction_for(measure: &SpectralMeasure, override_limit: Option<f64>) -> Prediction {
    let p = predicted_limit(measure.density());
    let independent = measure.atoms().is_empty()
        && measure
            .density()
            .is_some_and(|d| matches!(d.kind(), DensityKind::Uniform));
    Prediction {
        regime: p.regime,
        limit: override_limit.or(p.limit),
        independent,
        overridden: override_limit.is_some(),
    }
}

struct Context<'a> {
    config: &'a ScenarioConfig,
    measure: SpectralMeasure,
    rho: CorrelationSequence,
    prediction: Prediction,
    dir: PathBuf,
    samplers: Vec<OnceLock<std::result::Result<CoefficientSampler, trigzero::Error>>>,
}

impl Context<'_> {
    fn sampler(&self, index: usize) -> Result<&CoefficientSampler> {
        let n = self.config.degrees[index];
        self.samplers[index]
            .get_or_init(|| CoefficientSampler::new(&self.measure, n))
            .as_ref()
            .map_err(|e| CliError::Core(e.clone()))
    }

    fn entry(&self, file: &str, schema: &str) -> (PathBuf, OutputEntry) {
        (
            self.dir.join(file),
            OutputEntry {
                path: file.to_string(),
                schema: schema.to_string(),
            },
        )
    }

    fn ratio(&self, n: usize) -> Result<trigzero::kacrice::KacRiceProfile> {
        Ok(expected_zero_ratio(&self.rho, n, 0.0, 2.0 * PI)?)
    }
}

fn kacrice_sweep(ctx: &Context) -> Result<Vec<OutputEntry>> {
    let profiles: Vec<_> = ctx
        .config
        .degrees
        .par_iter()
        .map(|&n| ctx.ratio(n))
        .collect::<Result<_>>()?;
    let limit = ctx.prediction.limit;
    let rows: Vec<Vec<String>> = profiles
        .iter()
        .map(|p| {
            vec![
                p.n.to_string(),
                num(p.ratio),
                num(p.quadrature_error_estimate),
                opt_num(limit),
                opt_num(limit.map(|l| p.ratio - l)),
            ]
        })
        .collect();
    let (path, entry) = ctx.entry("kacrice_sweep.csv", "kacrice_sweep");
    write_csv(Some(&path), &output::KACRICE_SWEEP_HEADER, &rows)?;
    Ok(vec![entry])
}

fn integrand_profiles(ctx: &Context) -> Result<Vec<OutputEntry>> {
    let profiles: Vec<_> = ctx
        .config
        .degrees
        .par_iter()
        .map(|&n| integrand_profile(&ctx.rho, n, default_grid_size(n)).map(|p| (n, p)))
        .collect::<trigzero::Result<_>>()?;
    let mut entries = Vec::new();
    for (n, profile) in profiles {
        let rows: Vec<Vec<String>> = profile.iter().map(|(x, v)| vec![num(*x), num(*v)]).collect();
        let (path, entry) = ctx.entry(&format!("integrand_n{n}.csv"), "integrand_profile");
        write_csv(Some(&path), &output::INTEGRAND_HEADER, &rows)?;
        entries.push(entry);
    }
    Ok(entries)
}

fn zero_mc(ctx: &Context) -> Result<Vec<OutputEntry>> {
    let config = ctx.config;
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut entries = Vec::new();
    for (i, &n) in config.degrees.iter().enumerate() {
        let sampler = ctx.sampler(i)?;
        let stats = zero_statistics_with(sampler, config.replicates, config.master_seed)?;
        let kacrice = ctx.ratio(n)?.ratio;
        for r in &stats.rows {
            rows.push(vec![
                config.name.clone(),
                n.to_string(),
                r.replicate.to_string(),
                r.seed.to_string(),
                r.count.to_string(),
                num(r.ratio),
                r.suspicious.to_string(),
            ]);
        }
        summary.push(json!({
            "n": n,
            "replicates": stats.replicates,
            "mean_ratio": stats.mean_ratio,
            "se": stats.se,
            "kacrice_ratio": kacrice,
            "predicted_limit": ctx.prediction.limit,
            "gap": ctx.prediction.limit.map(|l| stats.mean_ratio - l),
        }));
        if config.dump_samples {
            let sample = sampler.sample(config.master_seed, 0);
            let rows: Vec<Vec<String>> = (0..n)
                .map(|k| vec![(k + 1).to_string(), num(sample.a[k]), num(sample.b[k])])
                .collect();
            let (path, entry) = ctx.entry(&format!("samples_n{n}.csv"), "samples");
            write_csv(Some(&path), &output::SAMPLES_HEADER, &rows)?;
            entries.push(entry);
        }
    }
    let (path, entry) = ctx.entry("zero_mc.csv", "zero_mc");
    write_csv(Some(&path), &output::ZERO_MC_HEADER, &rows)?;
    entries.insert(0, entry);
    let (path, entry) = ctx.entry("zero_summary.json", "zero_summary");
    write_json(&path, &summary)?;
    entries.insert(1, entry);
    Ok(entries)
}

fn cf_rows(curve: &CharFunctionCurve, n: usize) -> impl Iterator<Item = Vec<String>> + '_ {
    curve.t_grid.iter().zip(&curve.values).map(move |(t, v)| {
        vec![
            num(*t),
            num(v.re),
            num(v.im),
            curve.kind.as_str().to_string(),
            n.to_string(),
        ]
    })
}

fn szclt(ctx: &Context) -> Result<Vec<OutputEntry>> {
    let density = ctx
        .measure
        .density()
        .ok_or_else(|| CliError::config("measure", "the Salem-Zygmund limit needs a density part"))?;
    let t_grid = ctx.config.t_grid.clone().unwrap_or_else(default_t_grid);
    let limit = limit_cf(density, &t_grid)?;
    let x0 = ctx.config.x0.unwrap_or(DEFAULT_X0);
    let per_degree: Vec<_> = (0..ctx.config.degrees.len())
        .into_par_iter()
        .map(|i| -> Result<_> {
            let n = ctx.config.degrees[i];
            let m = default_grid_size(n);
            let sample = ctx.sampler(i)?.sample(ctx.config.master_seed, 0);
            let empirical = empirical_cf(&sample, &t_grid, m)?;
            let conditional = conditional_cf(&ctx.rho, n, &t_grid, m)?;
            let distances = json!({
                "n": n,
                "empirical_limit": cf_distance(&empirical, &limit)?,
                "empirical_conditional": cf_distance(&empirical, &conditional)?,
                "conditional_limit": cf_distance(&conditional, &limit)?,
            });
            let localized = LOCALIZED_CONFIGS
                .iter()
                .map(|(t, l)| localized_variance(&ctx.measure, &ctx.rho, n, x0, t, l))
                .collect::<trigzero::Result<Vec<_>>>()?;
            Ok((n, empirical, conditional, distances, localized))
        })
        .collect::<Result<_>>()?;
    let mut entries = Vec::new();
    let mut summary = Vec::new();
    let mut localized = Vec::new();
    for (n, empirical, conditional, distances, checks) in per_degree {
        let rows: Vec<Vec<String>> = cf_rows(&empirical, n)
            .chain(cf_rows(&conditional, n))
            .chain(cf_rows(&limit, n))
            .collect();
        let (path, entry) = ctx.entry(&format!("cf_n{n}.csv"), "cf_curve");
        write_csv(Some(&path), &output::CF_HEADER, &rows)?;
        entries.push(entry);
        summary.push(distances);
        localized.extend(checks);
    }
    let (path, entry) = ctx.entry("szclt_summary.json", "szclt_summary");
    write_json(&path, &summary)?;
    entries.push(entry);
    let (path, entry) = ctx.entry("localized.json", "localized");
    write_json(&path, &localized)?;
    entries.push(entry);
    Ok(entries)
}

fn hypotheses(ctx: &Context) -> Result<Vec<OutputEntry>> {
    let eta = ctx.config.eta.unwrap_or(DEFAULT_ETA);
    let gamma = ctx.config.gamma.unwrap_or(DEFAULT_GAMMA);
    let psd = validate_psd(&ctx.rho);
    let report = ctx.measure.hypothesis_report(eta, gamma)?;
    let report_json = report.map(|r| {
        json!({
            "eta": r.eta,
            "gamma": r.gamma,
            "nodal_measure": json_num(r.nodal_measure),
            "log_norm": json_num(r.log_norm),
            "neg_moment": json_num(r.neg_moment),
            "besov_exponent_estimate": json_num(r.besov_exponent_estimate),
            "besov_moduli": r.besov_moduli.iter().map(|(d, w)| json!([d, json_num(*w)])).collect::<Vec<_>>(),
            "applicable_theorems": r.applicable_theorems,
        })
    });
    let value = json!({
        "psd": {
            "fejer_min": psd.fejer_min,
            "fejer_orders": psd.fejer_orders,
            "toeplitz_order": psd.toeplitz_order,
            "toeplitz_min_eigenvalue": psd.toeplitz_min_eigenvalue,
            "pass": psd.pass,
        },
        "nodal_measure": ctx.measure.density().map(nodal_measure),
        "atoms": ctx.measure.atoms().len(),
        "report": report_json.unwrap_or(Value::Null),
        "prediction": ctx.prediction,
    });
    let (path, entry) = ctx.entry("hypotheses.json", "hypotheses");
    write_json(&path, &value)?;
    Ok(vec![entry])
}

fn covariance(ctx: &Context) -> Result<Vec<OutputEntry>> {
    let mut out = Vec::new();
    for (i, &n) in ctx.config.degrees.iter().enumerate() {
        let samples = ctx
            .sampler(i)?
            .sample_many(ctx.config.master_seed, ctx.config.replicates);
        let auto = covariance_check(&samples, &ctx.rho, 16.min(n - 1))?;
        let cross = cross_covariance_check(&samples, 8.min(n - 1))?;
        out.push(json!({ "n": n, "samples": samples.len(), "autocovariance": auto, "cross_covariance": cross }));
    }
    let (path, entry) = ctx.entry("covariance.json", "covariance");
    write_json(&path, &out)?;
    Ok(vec![entry])
}

fn run_task(ctx: &Context, task: Task) -> Result<Vec<OutputEntry>> {
    match task {
        Task::KacriceSweep => kacrice_sweep(ctx),
        Task::ZeroMc => zero_mc(ctx),
        Task::IntegrandProfile => integrand_profiles(ctx),
        Task::Szclt => szclt(ctx),
        Task::Hypotheses => hypotheses(ctx),
        Task::CovarianceCheck => covariance(ctx),
    }
}

/// Output directory: the override, else the configured one (relative to
/// `base_dir`), else `runs/<name>` under the working directory.
pub fn output_dir(config: &ScenarioConfig, base_dir: &Path, override_dir: Option<&Path>) -> PathBuf {
    match (override_dir, &config.output_dir) {
        (Some(dir), _) => dir.to_path_buf(),
        (None, Some(dir)) => resolve(base_dir, dir),
        (None, None) => Path::new("runs").join(&config.name),
    }
}

/// Runs every task of the scenario in order. An invalid measure is rejected
/// before any computation; a failing task is recorded and the rest still run.
pub fn run_scenario(config: &ScenarioConfig, base_dir: &Path, override_dir: Option<&Path>) -> Result<RunManifest> {
    config.validate()?;
    let measure = config.measure.build(base_dir)?;
    let max_n = *config.degrees.last().expect("validated nonempty");
    let rho = measure.correlation(max_n)?;
    let dir = output_dir(config, base_dir, override_dir);
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let ctx = Context {
        config,
        prediction: prediction_for(&measure, config.predicted_limit),
        measure,
        rho,
        dir: dir.clone(),
        samplers: config.degrees.iter().map(|_| OnceLock::new()).collect(),
    };
    let start = Instant::now();
    let created_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut tasks = Vec::new();
    for &task in &config.tasks {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(|| run_task(&ctx, task))).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "task panicked".into());
            Err(CliError::config(task.as_str(), msg))
        });
        let (status, error, outputs) = match outcome {
            Ok(outputs) => (TaskStatus::Ok, None, outputs),
            Err(e) => (TaskStatus::Failed, Some(e.to_string()), Vec::new()),
        };
        tasks.push(TaskRecord {
            task,
            status,
            error,
            outputs,
            wall_clock_seconds: t.elapsed().as_secs_f64(),
        });
    }
    let manifest = RunManifest {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        scenario: config.name.clone(),
        config_hash: config.hash(),
        config: config.clone(),
        prediction: ctx.prediction.clone(),
        created_unix,
        total_wall_clock_seconds: start.elapsed().as_secs_f64(),
        schemas: schemas(),
        tasks,
    };
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}
