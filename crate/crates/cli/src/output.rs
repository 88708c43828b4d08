//! CSV and JSON rendering and atomic-ish file output.
//!
//! Ratios are written in scientific notation with 15 significant digits; the
//! grids round ratios to 15 digits, so the text parses back to the same
//! `f64`. Other floats use Rust's shortest round-trip representation.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use qst_core::oracle::PhaseRow;
use qst_core::{FormulaEncoding, SweepResult, SweepRow};

use crate::config::Format;
use crate::CliError;

pub const SWEEP_HEADER: &str = "N,n,ratio,time,encoding,fidelity";
pub const ORACLE_HEADER: &str =
    "N,n,ratio,time,encoding,sigma_lambda,fidelity_oracle,fidelity_formula";
pub const PHASES_HEADER: &str = "pattern,predicted,measured,amplitude_error,match";

pub fn format_ratio(ratio: f64) -> String {
    format!("{ratio:.14e}")
}

pub fn sweep_csv(result: &SweepResult) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in &result.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.channel_length,
            r.register_size,
            format_ratio(r.ratio),
            r.time,
            r.encoding.tag(),
            r.fidelity
        );
    }
    out
}

/// Parses text written by [`sweep_csv`].
pub fn parse_sweep_csv(text: &str) -> Result<SweepResult, String> {
    let mut lines = text.lines();
    if lines.next() != Some(SWEEP_HEADER) {
        return Err("missing or unexpected header".into());
    }
    let rows = lines
        .enumerate()
        .map(|(i, line)| {
            let fields: Vec<&str> = line.split(',').collect();
            let [len, n, ratio, time, encoding, fidelity] = fields[..] else {
                return Err(format!("line {}: expected 6 fields", i + 2));
            };
            let bad = |what: &str| format!("line {}: bad {what}", i + 2);
            Ok(SweepRow {
                channel_length: len.parse().map_err(|_| bad("N"))?,
                register_size: n.parse().map_err(|_| bad("n"))?,
                ratio: ratio.parse().map_err(|_| bad("ratio"))?,
                time: time.parse().map_err(|_| bad("time"))?,
                encoding: match encoding {
                    "dfs" => FormulaEncoding::Dfs,
                    "ndfs" => FormulaEncoding::Ndfs,
                    _ => return Err(bad("encoding")),
                },
                fidelity: fidelity.parse().map_err(|_| bad("fidelity"))?,
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(SweepResult { rows })
}

pub fn sweep_json(result: &SweepResult) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(&result.rows)? + "\n")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleRow {
    #[serde(rename = "N")]
    pub channel_length: usize,
    #[serde(rename = "n")]
    pub register_size: usize,
    pub ratio: f64,
    pub time: f64,
    pub encoding: String,
    pub sigma_lambda: f64,
    pub fidelity_oracle: f64,
    /// Closed form, when one exists for the encoding and noise level.
    pub fidelity_formula: Option<f64>,
}

pub fn oracle_csv(rows: &[OracleRow]) -> String {
    let mut out = String::from(ORACLE_HEADER);
    out.push('\n');
    for r in rows {
        let formula = r
            .fidelity_formula
            .map(|f| f.to_string())
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.channel_length,
            r.register_size,
            format_ratio(r.ratio),
            r.time,
            r.encoding,
            r.sigma_lambda,
            r.fidelity_oracle,
            formula
        );
    }
    out
}

pub fn phases_csv(rows: &[PhaseRow]) -> String {
    let mut out = String::from(PHASES_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.pattern, r.predicted, r.measured, r.amplitude_error, r.matches
        );
    }
    out
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Renders `csv` or `json` according to `format`.
pub fn render<T: Serialize + ?Sized>(
    format: Format,
    value: &T,
    csv: impl FnOnce() -> String,
) -> Result<String, CliError> {
    match format {
        Format::Csv => Ok(csv()),
        Format::Json => to_json(value),
    }
}

/// Writes `text` to `path`, or stdout when `None`. A file left incomplete by
/// a failed write is removed.
pub fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    let io_err = |source: std::io::Error, path: &Path| CliError::Io {
        path: path.display().to_string(),
        source,
    };
    match path {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| io_err(e, Path::new("<stdout>")))
        }
        Some(path) => {
            let result = std::fs::File::create(path).and_then(|mut f| {
                f.write_all(text.as_bytes())?;
                f.sync_all()
            });
            result.map_err(|e| {
                let _ = std::fs::remove_file(path);
                io_err(e, path)
            })
        }
    }
}
