use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use trigzero_cli::config::Task;
use trigzero_cli::run::{TaskStatus, MANIFEST_FILE};
use trigzero_cli::{compare_report, run_scenario, CliError, RunManifest, ScenarioConfig};

const ALL_TASKS: &str =
    r#"["kacrice_sweep", "zero_mc", "integrand_profile", "szclt", "hypotheses", "covariance_check"]"#;

fn small_config(name: &str, extra: &str) -> ScenarioConfig {
    let text = format!(
        r#"
name = "{name}"
degrees = [16, 64]
replicates = 60
master_seed = 11
tasks = {ALL_TASKS}
{extra}

[measure.density]
kind = "poisson"
r = 0.5
"#
    );
    ScenarioConfig::from_toml(&text).unwrap()
}

fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    files.sort();
    files
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let config = small_config("repeat", "dump_samples = true");
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    run_scenario(&config, tmp.path(), Some(&a)).unwrap();
    run_scenario(&config, tmp.path(), Some(&b)).unwrap();
    let files = csv_files(&a);
    assert!(files.len() >= 8, "expected csv outputs, found {files:?}");
    for f in files {
        let name = f.file_name().unwrap();
        assert_eq!(
            fs::read(&f).unwrap(),
            fs::read(b.join(name)).unwrap(),
            "{name:?} differs"
        );
    }
    for json in ["zero_summary.json", "szclt_summary.json", "hypotheses.json"] {
        assert_eq!(
            fs::read(a.join(json)).unwrap(),
            fs::read(b.join(json)).unwrap(),
            "{json} differs"
        );
    }
}

#[test]
fn manifest_lists_every_task_once_with_existing_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let config = small_config("manifest", "");
    let manifest = run_scenario(&config, tmp.path(), Some(&out)).unwrap();
    let reloaded = RunManifest::load(&out.join(MANIFEST_FILE)).unwrap();
    assert_eq!(reloaded.config_hash, config.hash());
    assert_eq!(reloaded.tasks.len(), config.tasks.len());
    for task in &config.tasks {
        let hits = reloaded.tasks.iter().filter(|r| r.task == *task).count();
        assert_eq!(hits, 1, "{task:?}");
        let record = reloaded.task(*task).unwrap();
        assert_eq!(record.status, TaskStatus::Ok, "{task:?}: {:?}", record.error);
        assert!(!record.outputs.is_empty());
        for o in &record.outputs {
            assert!(out.join(&o.path).is_file(), "missing {}", o.path);
        }
    }
    let table = compare_report(&manifest, &out);
    assert!(table.ok(), "{table}");
}

#[test]
fn wrong_predicted_limit_fails_the_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("neg");
    let mut config = small_config("negative", "predicted_limit = 1.5");
    config.tasks = vec![Task::KacriceSweep];
    let manifest = run_scenario(&config, tmp.path(), Some(&out)).unwrap();
    assert!(manifest.prediction.overridden);
    let table = compare_report(&manifest, &out);
    assert!(!table.ok(), "a false limit must not pass:\n{table}");
}

#[test]
fn binary_exits_nonzero_on_failed_verdict() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("neg.toml");
    fs::write(
        &path,
        r#"
name = "negative"
degrees = [16, 64]
tasks = ["kacrice_sweep"]
predicted_limit = 1.5
[measure.density]
kind = "uniform"
"#,
    )
    .unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_trigzero"))
        .arg("run")
        .arg(&path)
        .arg("--out")
        .arg(tmp.path().join("out"))
        .output()
        .unwrap();
    assert_eq!(
        status.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&status.stdout)
    );
    assert!(String::from_utf8_lossy(&status.stdout).contains("fail"));
}

#[test]
fn invalid_measure_is_rejected_before_any_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("bad");
    let mut config = small_config("bad", "");
    config.measure = toml::from_str("[density]\nkind = \"box\"\na = 4.0\n").unwrap();
    let err = run_scenario(&config, tmp.path(), Some(&out)).unwrap_err();
    match &err {
        CliError::Config { field, .. } => assert_eq!(field, "measure.density.a"),
        other => panic!("unexpected error {other}"),
    }
    assert!(!out.exists());

    config.measure =
        toml::from_str("[[atoms]]\nalpha = 0.5\nweight = 0.6\n[density]\nkind = \"uniform\"\nweight = 0.6\n").unwrap();
    let err = run_scenario(&config, tmp.path(), Some(&out)).unwrap_err();
    assert!(err.to_string().contains("measure"), "{err}");
}

#[test]
fn bundled_scenarios_parse_validate_and_build() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    let mut seen = 0;
    let mut seeds = Vec::new();
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_none_or(|e| e != "toml") {
            continue;
        }
        let (config, base) = ScenarioConfig::load(&path).unwrap();
        config.validate().unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        config
            .measure
            .build(&base)
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(path.file_stem().unwrap().to_str().unwrap(), config.name);
        seeds.push(config.master_seed);
        seen += 1;
    }
    assert!(seen >= 8, "only {seen} scenarios");
    seeds.sort_unstable();
    seeds.dedup();
    assert_eq!(seeds.len(), seen, "scenarios share a master seed");
}
