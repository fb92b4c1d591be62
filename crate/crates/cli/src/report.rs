//! Verdicts for a finished run: predicted limits against Kac–Rice values and
//! Monte Carlo means, with fixed tolerances.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use trigzero::kacrice::{independent_ratio, Regime};

use crate::config::Task;
use crate::output::{self, read_csv};
use crate::run::{RunManifest, TaskStatus};

/// `|ratio − limit|` at the largest degree, non-universal regime.
pub const NONUNIVERSAL_TOLERANCE: f64 = 0.03;
/// `|ratio − limit|` at the largest degree, universal regime.
pub const UNIVERSAL_TOLERANCE: f64 = 0.02;
pub const INDEPENDENT_TOLERANCE: f64 = 1e-6;
/// Band and minimum spread of ratios for a purely atomic measure.
pub const ATOMIC_BAND: (f64, f64) = (1.35, 2.05);
pub const ATOMIC_SPREAD: f64 = 0.1;
/// Monte Carlo mean against Kac–Rice, in standard errors.
pub const MC_SIGMAS: f64 = 3.0;
pub const LOCALIZED_TOLERANCE: f64 = 0.05;
/// Distances below this are round-off; no decrease is required.
pub const ROUND_OFF: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Incomplete,
    /// Recorded for reference; no tolerance applies.
    Info,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Incomplete => "incomplete",
            Verdict::Info => "info",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRow {
    pub scenario: String,
    pub check: String,
    pub expected: String,
    pub observed: String,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictTable {
    pub rows: Vec<VerdictRow>,
}

impl VerdictTable {
    /// True when nothing failed or went missing.
    pub fn ok(&self) -> bool {
        self.rows
            .iter()
            .all(|r| matches!(r.verdict, Verdict::Pass | Verdict::Info))
    }
}

impl fmt::Display for VerdictTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let widths = self.rows.iter().fold([8, 5, 8, 8], |w, r| {
            [
                w[0].max(r.scenario.len()),
                w[1].max(r.check.len()),
                w[2].max(r.expected.len()),
                w[3].max(r.observed.len()),
            ]
        });
        writeln!(
            f,
            "{:<a$}  {:<b$}  {:<c$}  {:<d$}  verdict",
            "scenario",
            "check",
            "expected",
            "observed",
            a = widths[0],
            b = widths[1],
            c = widths[2],
            d = widths[3]
        )?;
        for r in &self.rows {
            writeln!(
                f,
                "{:<a$}  {:<b$}  {:<c$}  {:<d$}  {}",
                r.scenario,
                r.check,
                r.expected,
                r.observed,
                r.verdict,
                a = widths[0],
                b = widths[1],
                c = widths[2],
                d = widths[3]
            )?;
        }
        Ok(())
    }
}

struct Builder<'a> {
    scenario: &'a str,
    rows: Vec<VerdictRow>,
}

impl Builder<'_> {
    fn push(
        &mut self,
        check: impl Into<String>,
        expected: impl Into<String>,
        observed: impl Into<String>,
        verdict: Verdict,
    ) {
        self.rows.push(VerdictRow {
            scenario: self.scenario.to_string(),
            check: check.into(),
            expected: expected.into(),
            observed: observed.into(),
            verdict,
        });
    }

    fn judge(&mut self, check: impl Into<String>, expected: impl Into<String>, observed: impl Into<String>, ok: bool) {
        let v = if ok { Verdict::Pass } else { Verdict::Fail };
        self.push(check, expected, observed, v);
    }

    fn incomplete(&mut self, check: impl Into<String>, why: impl Into<String>) {
        self.push(check, "-", why, Verdict::Incomplete);
    }
}

fn output_path<'a>(manifest: &'a RunManifest, task: Task, schema: &str) -> Option<&'a str> {
    manifest
        .task(task)?
        .outputs
        .iter()
        .find(|o| o.schema == schema)
        .map(|o| o.path.as_str())
}

fn read_json(dir: &Path, file: &str) -> Result<Value, String> {
    let path = dir.join(file);
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn field(v: &Value, key: &str) -> Option<f64> {
    v.get(key)?.as_f64()
}

fn sweep_rows(dir: &Path, file: &str) -> Result<Vec<(usize, f64)>, String> {
    let rows = read_csv(&dir.join(file), &output::KACRICE_SWEEP_HEADER).map_err(|e| e.to_string())?;
    rows.iter()
        .map(|r| match (r[0].parse(), r[1].parse()) {
            (Ok(n), Ok(ratio)) => Ok((n, ratio)),
            _ => Err(format!("{file}: malformed row {r:?}")),
        })
        .collect()
}

fn kacrice_checks(b: &mut Builder, manifest: &RunManifest, dir: &Path) {
    let Some(file) = output_path(manifest, Task::KacriceSweep, "kacrice_sweep") else {
        return b.incomplete("kacrice", "sweep output missing");
    };
    let rows = match sweep_rows(dir, file) {
        Ok(rows) if !rows.is_empty() => rows,
        Ok(_) => return b.incomplete("kacrice", "sweep output is empty"),
        Err(e) => return b.incomplete("kacrice", e),
    };
    let p = &manifest.prediction;
    if p.independent {
        let worst = rows
            .iter()
            .map(|&(n, r)| (r - independent_ratio(n)).abs())
            .fold(0.0, f64::max);
        b.judge(
            "kacrice closed form",
            format!("(2/n)sqrt((n+1)(2n+1)/6) ± {INDEPENDENT_TOLERANCE:e}"),
            format!("max error {worst:.3e}"),
            worst < INDEPENDENT_TOLERANCE,
        );
    }
    let (n_max, r_max) = *rows.last().expect("nonempty");
    let (n_min, r_min) = rows[0];
    match (p.limit, p.regime) {
        (Some(limit), regime) => {
            let tol = match regime {
                Regime::NonUniversal { .. } => NONUNIVERSAL_TOLERANCE,
                _ => UNIVERSAL_TOLERANCE,
            };
            let gap = (r_max - limit).abs();
            b.judge(
                format!("kacrice limit n={n_max}"),
                format!("{limit:.6} ± {tol}"),
                format!("{r_max:.6}"),
                gap < tol,
            );
            if rows.len() > 1 {
                let first = (r_min - limit).abs();
                b.judge(
                    format!("kacrice approach n={n_min}->{n_max}"),
                    "gap decreases",
                    format!("{first:.2e} -> {gap:.2e}"),
                    gap < first,
                );
            }
        }
        (None, _) => {
            let lo = rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
            let hi = rows.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
            b.judge(
                "kacrice atomic band",
                format!("[{}, {}]", ATOMIC_BAND.0, ATOMIC_BAND.1),
                format!("[{lo:.4}, {hi:.4}]"),
                lo >= ATOMIC_BAND.0 && hi <= ATOMIC_BAND.1,
            );
            if rows.len() > 1 {
                b.judge(
                    "kacrice atomic spread",
                    format!(">= {ATOMIC_SPREAD}"),
                    format!("{:.4}", hi - lo),
                    hi - lo >= ATOMIC_SPREAD,
                );
            }
        }
    }
}

fn zero_mc_checks(b: &mut Builder, manifest: &RunManifest, dir: &Path) {
    let Some(file) = output_path(manifest, Task::ZeroMc, "zero_summary") else {
        return b.incomplete("zero_mc", "summary output missing");
    };
    let summary = match read_json(dir, file) {
        Ok(Value::Array(items)) => items,
        Ok(_) => return b.incomplete("zero_mc", "summary is not a list"),
        Err(e) => return b.incomplete("zero_mc", e),
    };
    for item in summary {
        let (Some(n), Some(mean), Some(se), Some(kr)) = (
            field(&item, "n"),
            field(&item, "mean_ratio"),
            field(&item, "se"),
            field(&item, "kacrice_ratio"),
        ) else {
            b.incomplete("zero_mc", "malformed summary entry");
            continue;
        };
        let gap = (mean - kr).abs();
        if se == 0.0 {
            // every replicate had the same count (n = 1 has exactly two zeros)
            b.judge(
                format!("mc vs kacrice n={n}"),
                format!("{kr:.5} exactly"),
                format!("{mean:.5} with zero variance"),
                gap <= ROUND_OFF,
            );
            continue;
        }
        let z = gap / se;
        b.judge(
            format!("mc vs kacrice n={n}"),
            format!("{kr:.5} within {MC_SIGMAS} SE"),
            format!("{mean:.5} ± {se:.5} ({z:.2} SE)"),
            z <= MC_SIGMAS,
        );
    }
}

fn szclt_checks(b: &mut Builder, manifest: &RunManifest, dir: &Path) {
    let Some(file) = output_path(manifest, Task::Szclt, "szclt_summary") else {
        return b.incomplete("szclt", "summary output missing");
    };
    let summary = match read_json(dir, file) {
        Ok(Value::Array(items)) if !items.is_empty() => items,
        Ok(_) => return b.incomplete("szclt", "summary is empty"),
        Err(e) => return b.incomplete("szclt", e),
    };
    let first = &summary[0];
    let last = &summary[summary.len() - 1];
    if summary.len() > 1 {
        if let (Some(n0), Some(d0), Some(n1), Some(d1)) = (
            field(first, "n"),
            field(first, "conditional_limit"),
            field(last, "n"),
            field(last, "conditional_limit"),
        ) {
            b.judge(
                format!("cf conditional->limit n={n0}->{n1}"),
                "distance decreases",
                format!("{d0:.2e} -> {d1:.2e}"),
                d1 < d0 || d0.max(d1) <= ROUND_OFF,
            );
        }
        if let (Some(d0), Some(d1)) = (field(first, "empirical_limit"), field(last, "empirical_limit")) {
            b.push(
                "cf empirical->limit",
                "-",
                format!("{d0:.2e} -> {d1:.2e}"),
                Verdict::Info,
            );
        }
    }
    let Some(file) = output_path(manifest, Task::Szclt, "localized") else {
        return b.incomplete("localized variance", "output missing");
    };
    let checks = match read_json(dir, file) {
        Ok(Value::Array(items)) => items,
        _ => return b.incomplete("localized variance", "unreadable output"),
    };
    let n_max = field(last, "n").unwrap_or(0.0);
    for check in checks.iter().filter(|c| field(c, "n") == Some(n_max)) {
        let Some(gap) = field(check, "rel_gap") else { continue };
        let t = check.get("t_points").map(|v| v.to_string()).unwrap_or_default();
        b.judge(
            format!("localized variance t={t} n={n_max}"),
            format!("< {LOCALIZED_TOLERANCE}"),
            format!("{gap:.2e}"),
            gap < LOCALIZED_TOLERANCE,
        );
    }
}

fn hypotheses_checks(b: &mut Builder, manifest: &RunManifest, dir: &Path) {
    let Some(file) = output_path(manifest, Task::Hypotheses, "hypotheses") else {
        return b.incomplete("hypotheses", "output missing");
    };
    let value = match read_json(dir, file) {
        Ok(v) => v,
        Err(e) => return b.incomplete("hypotheses", e),
    };
    let psd = value.pointer("/psd/pass").and_then(Value::as_bool).unwrap_or(false);
    let min_eig = value
        .pointer("/psd/toeplitz_min_eigenvalue")
        .and_then(Value::as_f64)
        .unwrap_or(f64::NAN);
    b.judge(
        "correlation is positive definite",
        "pass",
        format!("min eigenvalue {min_eig:.3e}"),
        psd,
    );
    let theorems = value
        .pointer("/report/applicable_theorems")
        .and_then(Value::as_array)
        .map(|t| t.iter().filter_map(Value::as_str).collect::<Vec<_>>().join(" "))
        .unwrap_or_else(|| "none (no density)".into());
    b.push("applicable theorems", "-", theorems, Verdict::Info);
}

fn covariance_checks(b: &mut Builder, manifest: &RunManifest, dir: &Path) {
    let Some(file) = output_path(manifest, Task::CovarianceCheck, "covariance") else {
        return b.incomplete("covariance", "output missing");
    };
    let items = match read_json(dir, file) {
        Ok(Value::Array(items)) => items,
        _ => return b.incomplete("covariance", "unreadable output"),
    };
    for item in items {
        let n = field(&item, "n").unwrap_or(0.0);
        for key in ["autocovariance", "cross_covariance"] {
            let pass = item.pointer(&format!("/{key}/pass")).and_then(Value::as_bool);
            match pass {
                Some(p) => b.judge(
                    format!("{key} n={n}"),
                    "all lags within 4 SE",
                    if p { "ok" } else { "outside" },
                    p,
                ),
                None => b.incomplete(format!("{key} n={n}"), "malformed"),
            }
        }
    }
}

/// One table for one manifest; `dir` is the manifest's directory.
pub fn compare_report(manifest: &RunManifest, dir: &Path) -> VerdictTable {
    let mut b = Builder {
        scenario: &manifest.scenario,
        rows: Vec::new(),
    };
    for task in &manifest.config.tasks {
        let Some(record) = manifest.task(*task) else {
            b.incomplete(task.as_str(), "no manifest entry");
            continue;
        };
        if record.status == TaskStatus::Failed {
            b.incomplete(task.as_str(), record.error.clone().unwrap_or_else(|| "failed".into()));
            continue;
        }
        if let Some(missing) = record.outputs.iter().find(|o| !dir.join(&o.path).is_file()) {
            b.incomplete(task.as_str(), format!("missing {}", missing.path));
            continue;
        }
        match task {
            Task::KacriceSweep => kacrice_checks(&mut b, manifest, dir),
            Task::ZeroMc => zero_mc_checks(&mut b, manifest, dir),
            Task::Szclt => szclt_checks(&mut b, manifest, dir),
            Task::Hypotheses => hypotheses_checks(&mut b, manifest, dir),
            Task::CovarianceCheck => covariance_checks(&mut b, manifest, dir),
            Task::IntegrandProfile => b.push(
                "integrand profile",
                "-",
                format!("{} files", record.outputs.len()),
                Verdict::Info,
            ),
        }
    }
    VerdictTable { rows: b.rows }
}
