//! CSV and JSON artifacts. Numbers use Rust's shortest round-trip form.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, Result};

pub const KACRICE_SWEEP_HEADER: [&str; 5] = ["n", "ratio", "error_estimate", "predicted_limit", "gap"];
pub const INTEGRAND_HEADER: [&str; 2] = ["x", "integrand"];
pub const ZERO_MC_HEADER: [&str; 7] = ["scenario", "n", "replicate", "seed", "count", "ratio", "suspicious"];
pub const CF_HEADER: [&str; 5] = ["t", "re", "im", "kind", "n"];
pub const KERNEL_PROFILE_HEADER: [&str; 4] = ["x", "s0", "s1", "s2"];
pub const SAMPLES_HEADER: [&str; 3] = ["k", "a_k", "b_k"];

/// Round-trip decimal text; switches to exponent form for very large or
/// small magnitudes.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Writes a CSV file, or standard output when `path` is `None`.
pub fn write_csv(path: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let sink: Box<dyn std::io::Write> = match path {
        Some(p) => Box::new(std::fs::File::create(p).map_err(|e| CliError::io(p, e))?),
        None => Box::new(std::io::stdout().lock()),
    };
    let label = path.map(Path::to_path_buf).unwrap_or_else(|| "<stdout>".into());
    let mut writer = csv::Writer::from_writer(sink);
    let io = |e: csv::Error| CliError::parse(&label, e);
    writer.write_record(header).map_err(io)?;
    for row in rows {
        writer.write_record(row).map_err(io)?;
    }
    writer.flush().map_err(|e| CliError::io(&label, e))
}

/// A JSON number, or `"inf"`, `"-inf"`, `"nan"` for values plain JSON
/// cannot carry.
pub fn json_num(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else if v.is_nan() {
        Value::from("nan")
    } else if v > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::parse(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

/// Reads a CSV body as rows of strings, checking the header.
pub fn read_csv(path: &Path, header: &[&str]) -> Result<Vec<Vec<String>>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| CliError::parse(path, e))?;
    let found = reader.headers().map_err(|e| CliError::parse(path, e))?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(CliError::parse(path, format!("expected header '{}'", header.join(","))));
    }
    reader
        .records()
        .map(|r| {
            r.map(|rec| rec.iter().map(str::to_string).collect())
                .map_err(|e| CliError::parse(path, e))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, 1.0 / 3.0, 2.0 / 3f64.sqrt(), 1e-300, 6.02e23, -0.0] {
            assert_eq!(num(v).parse::<f64>().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(opt_num(None), "");
    }

    #[test]
    fn non_finite_values_survive_json() {
        assert_eq!(json_num(f64::INFINITY), Value::from("inf"));
        assert_eq!(json_num(f64::NEG_INFINITY), Value::from("-inf"));
        assert_eq!(json_num(f64::NAN), Value::from("nan"));
        assert_eq!(json_num(0.5), Value::from(0.5));
    }

    #[test]
    fn csv_round_trip_checks_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("k.csv");
        let rows = vec![vec![num(0.25), num(1.5), num(0.0), num(-2.0)]];
        write_csv(Some(&path), &KERNEL_PROFILE_HEADER, &rows).unwrap();
        assert_eq!(read_csv(&path, &KERNEL_PROFILE_HEADER).unwrap(), rows);
        assert!(read_csv(&path, &INTEGRAND_HEADER).is_err());
    }
}
