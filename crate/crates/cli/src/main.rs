use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use trigzero::kacrice::expected_zero_ratio;
use trigzero::kernels::{convolution_profile, default_grid_size, KernelCoefficients};
use trigzero::sampler::CoefficientSampler;
use trigzero::szclt::{cf_distance, conditional_cf, default_t_grid, empirical_cf, limit_cf};
use trigzero::zeros::zero_statistics_with;
use trigzero::SpectralMeasure;
use trigzero_cli::output::{self, num, opt_num, write_csv};
use trigzero_cli::run::{prediction_for, MANIFEST_FILE};
use trigzero_cli::{
    compare_report, configure_threads, run_scenario, CliError, MeasureDecl, RunManifest, ScenarioConfig,
};

#[derive(Parser)]
#[command(
    name = "trigzero",
    version,
    about = "Zeros of random trigonometric polynomials with dependent coefficients"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and print its verdict table.
    Run {
        config: PathBuf,
        /// Overrides the scenario's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the verdict table of a finished run (manifest file or its directory).
    Report {
        manifest: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Kernel convolution profile `x,s0,s1,s2` of a measure at degree n.
    Kernels {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "independent")]
        measure: String,
        /// Grid size (power of two); defaults to max(4096, 32n rounded up).
        #[arg(long)]
        grid: Option<usize>,
        /// Write the profile CSV here (`-` for stdout); otherwise print a summary.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Kac-Rice expected zero ratio E[N]/n for one or more degrees.
    Kacrice {
        #[arg(long)]
        measure: String,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        n: Vec<usize>,
    },
    /// Monte Carlo zero counts; summary JSON on stdout.
    Zeros {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Per-replicate CSV destination.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Empirical, conditional and limit characteristic functions as CSV.
    Szclt {
        #[arg(long)]
        measure: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn measure(text: &str) -> Result<SpectralMeasure, CliError> {
    MeasureDecl::parse_inline(text)?.build(Path::new("."))
}

fn run(config: &Path, out: Option<&Path>) -> Result<bool, CliError> {
    let (config, base) = ScenarioConfig::load(config)?;
    let manifest = run_scenario(&config, &base, out)?;
    let dir = trigzero_cli::run::output_dir(&config, &base, out);
    eprintln!("wrote {}", dir.join(MANIFEST_FILE).display());
    let table = compare_report(&manifest, &dir);
    print!("{table}");
    Ok(table.ok())
}

fn report(path: &Path, as_json: bool) -> Result<bool, CliError> {
    let file = if path.is_dir() {
        path.join(MANIFEST_FILE)
    } else {
        path.to_path_buf()
    };
    let manifest = RunManifest::load(&file)?;
    let dir = file.parent().map(Path::to_path_buf).unwrap_or_default();
    let table = compare_report(&manifest, &dir);
    if as_json {
        println!("{}", serde_json::to_string_pretty(&table).expect("serializable"));
    } else {
        print!("{table}");
    }
    Ok(table.ok())
}

fn kernels(n: usize, measure_text: &str, grid: Option<usize>, dump: Option<&Path>) -> Result<bool, CliError> {
    if n == 0 {
        return Err(CliError::config("n", "degree must be positive"));
    }
    let m = measure(measure_text)?;
    let rho = m.correlation(n)?;
    let grid = grid.unwrap_or_else(|| default_grid_size(n));
    let profile = convolution_profile(&rho, n, grid)?;
    match dump {
        Some(path) => {
            let rows: Vec<Vec<String>> = (0..profile.m)
                .map(|j| {
                    vec![
                        num(profile.x(j)),
                        num(profile.s0[j]),
                        num(profile.s1[j]),
                        num(profile.s2[j]),
                    ]
                })
                .collect();
            let target = (path != Path::new("-")).then_some(path);
            write_csv(target, &output::KERNEL_PROFILE_HEADER, &rows)?;
        }
        None => {
            let coeffs = KernelCoefficients::new(n);
            let fold = |v: &[f64], f: fn(f64, f64) -> f64, init: f64| v.iter().copied().fold(init, f);
            let summary = json!({
                "n": n,
                "grid": grid,
                "fejer_mass": coeffs.fejer[0],
                "ln_mass": coeffs.alpha_n * coeffs.ln_scaled[0],
                "s0_min": fold(&profile.s0, f64::min, f64::INFINITY),
                "s0_max": fold(&profile.s0, f64::max, f64::NEG_INFINITY),
                "s2_max": fold(&profile.s2, f64::max, f64::NEG_INFINITY),
            });
            println!("{}", serde_json::to_string_pretty(&summary).expect("serializable"));
        }
    }
    Ok(true)
}

fn kacrice(measure_text: &str, degrees: &[usize]) -> Result<bool, CliError> {
    if degrees.is_empty() || degrees.contains(&0) {
        return Err(CliError::config("n", "give one or more positive degrees"));
    }
    let m = measure(measure_text)?;
    let rho = m.correlation(*degrees.iter().max().expect("nonempty"))?;
    let limit = prediction_for(&m, None).limit;
    let mut rows = Vec::new();
    for &n in degrees {
        let p = expected_zero_ratio(&rho, n, 0.0, 2.0 * PI)?;
        rows.push(vec![
            n.to_string(),
            num(p.ratio),
            num(p.quadrature_error_estimate),
            opt_num(limit),
            opt_num(limit.map(|l| p.ratio - l)),
        ]);
    }
    write_csv(None, &output::KACRICE_SWEEP_HEADER, &rows)?;
    Ok(true)
}

fn zeros(measure_text: &str, n: usize, reps: usize, seed: u64, out: Option<&Path>) -> Result<bool, CliError> {
    let m = measure(measure_text)?;
    let sampler = CoefficientSampler::new(&m, n)?;
    let stats = zero_statistics_with(&sampler, reps, seed)?;
    let rho = m.correlation(n)?;
    let kacrice = expected_zero_ratio(&rho, n, 0.0, 2.0 * PI)?.ratio;
    if let Some(path) = out {
        let rows: Vec<Vec<String>> = stats
            .rows
            .iter()
            .map(|r| {
                vec![
                    measure_text.to_string(),
                    n.to_string(),
                    r.replicate.to_string(),
                    r.seed.to_string(),
                    r.count.to_string(),
                    num(r.ratio),
                    r.suspicious.to_string(),
                ]
            })
            .collect();
        write_csv(Some(path), &output::ZERO_MC_HEADER, &rows)?;
    }
    let summary = json!({
        "n": n,
        "replicates": stats.replicates,
        "mean_ratio": stats.mean_ratio,
        "se": stats.se,
        "kacrice_ratio": kacrice,
        "predicted_limit": prediction_for(&m, None).limit,
    });
    println!("{}", serde_json::to_string_pretty(&summary).expect("serializable"));
    Ok(true)
}

fn szclt(measure_text: &str, n: usize, seed: u64) -> Result<bool, CliError> {
    let m = measure(measure_text)?;
    let density = m
        .density()
        .ok_or_else(|| CliError::config("measure", "the Salem-Zygmund limit needs a density part"))?;
    let t_grid = default_t_grid();
    let grid = default_grid_size(n);
    let sample = CoefficientSampler::new(&m, n)?.sample(seed, 0);
    let empirical = empirical_cf(&sample, &t_grid, grid)?;
    let conditional = conditional_cf(&m.correlation(n)?, n, &t_grid, grid)?;
    let limit = limit_cf(density, &t_grid)?;
    let mut rows = Vec::new();
    for curve in [&empirical, &conditional, &limit] {
        for (t, v) in curve.t_grid.iter().zip(&curve.values) {
            rows.push(vec![
                num(*t),
                num(v.re),
                num(v.im),
                curve.kind.as_str().to_string(),
                n.to_string(),
            ]);
        }
    }
    write_csv(None, &output::CF_HEADER, &rows)?;
    eprintln!(
        "sup |empirical - limit| = {:.4e}, sup |conditional - limit| = {:.4e}",
        cf_distance(&empirical, &limit)?,
        cf_distance(&conditional, &limit)?
    );
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let outcome = match &cli.command {
        Command::Run { config, out } => run(config, out.as_deref()),
        Command::Report { manifest, json } => report(manifest, *json),
        Command::Kernels { n, measure, grid, dump } => kernels(*n, measure, *grid, dump.as_deref()),
        Command::Kacrice { measure, n } => kacrice(measure, n),
        Command::Zeros {
            measure,
            n,
            reps,
            seed,
            out,
        } => zeros(measure, *n, *reps, *seed, out.as_deref()),
        Command::Szclt { measure, n, seed } => szclt(measure, *n, *seed),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
