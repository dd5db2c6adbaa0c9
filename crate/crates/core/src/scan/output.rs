//! CSV tables and their JSON metadata sidecars.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bounds::{GConvention, DEGENERATE_DRIVE_TOL, PHI_TOL, VALIDITY_TOL};
use crate::entropy::{OVERLAP_TOL, PURITY_TOL, SUPPORT_TOL};
use crate::evolution::Quadrature;
use crate::linalg::HERMITIAN_TOL;
use crate::state::DEFAULT_RANK_TOL;

pub const SIGNIFICANT_DIGITS: usize = 12;

/// Shortest of fixed or scientific notation carrying 12 significant digits.
///
/// Non-finite values print as `NaN`, `inf` and `-inf`.
pub fn fmt_sig(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim_zeros(mantissa))
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` as it reads back from [`fmt_sig`].
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        fmt_sig(x).parse().expect("fmt_sig output parses")
    } else {
        x
    }
}

/// `rhs - lhs` from the printed values, so the column recomputes exactly.
pub fn printed_slack(lhs: f64, rhs: f64) -> f64 {
    round_sig(rhs) - round_sig(lhs)
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Tolerances {
    pub validity: f64,
    pub phi_denominator: f64,
    pub degenerate_drive: f64,
    pub overlap: f64,
    pub purity: f64,
    pub support: f64,
    pub rank: f64,
    pub hermitian: f64,
    pub significant_digits: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            validity: VALIDITY_TOL,
            phi_denominator: PHI_TOL,
            degenerate_drive: DEGENERATE_DRIVE_TOL,
            overlap: OVERLAP_TOL,
            purity: PURITY_TOL,
            support: SUPPORT_TOL,
            rank: DEFAULT_RANK_TOL,
            hermitian: HERMITIAN_TOL,
            significant_digits: SIGNIFICANT_DIGITS,
        }
    }
}

/// Run-wide fields recorded in every sidecar.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunInfo {
    pub command: String,
    pub convention: GConvention,
    pub steps: usize,
    pub quadrature: Quadrature,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub tolerances: Tolerances,
    pub version: &'static str,
}

impl RunInfo {
    pub fn new(command: &str, convention: GConvention, steps: usize, quadrature: Quadrature) -> Self {
        Self {
            command: command.into(),
            convention,
            steps,
            quadrature,
            seed: None,
            tolerances: Tolerances::default(),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

/// Rows of pre-formatted cells under a fixed header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Table-specific parameters for the sidecar.
    pub parameters: serde_json::Value,
}

impl Table {
    pub fn new(name: impl Into<String>, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
            parameters: serde_json::Value::Null,
        }
    }

    pub fn with_parameters(mut self, parameters: serde_json::Value) -> Self {
        self.parameters = parameters;
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

#[derive(Serialize)]
struct Sidecar<'a> {
    file: String,
    #[serde(flatten)]
    run: &'a RunInfo,
    columns: &'a [String],
    rows: usize,
    parameters: &'a serde_json::Value,
}

/// Writes `<name>.csv` and `<name>.meta.json` under `dir`, returning the CSV path.
pub fn write_table(dir: &Path, table: &Table, run: &RunInfo) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let csv_path = dir.join(format!("{}.csv", table.name));
    let mut writer = csv::WriterBuilder::new().delimiter(b',').from_path(&csv_path)?;
    writer.write_record(&table.header)?;
    for row in &table.rows {
        writer.write_record(row)?;
    }
    writer.flush()?;

    let sidecar = Sidecar {
        file: format!("{}.csv", table.name),
        run,
        columns: &table.header,
        rows: table.rows.len(),
        parameters: &table.parameters,
    };
    let json = serde_json::to_string_pretty(&sidecar).map_err(io::Error::other)?;
    fs::write(dir.join(format!("{}.meta.json", table.name)), json + "\n")?;
    Ok(csv_path)
}

/// Writes `<name>.json` under `dir`.
pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(format!("{name}.json"));
    let json = serde_json::to_string_pretty(value).map_err(io::Error::other)?;
    fs::write(&path, json + "\n")?;
    Ok(path)
}
