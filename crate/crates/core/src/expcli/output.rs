use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::evalkit::MetricsReport;
use crate::Error;

use super::{ExpError, Method};

pub const RESULTS_HEADER: &str =
    "method,seed,accuracy,f1,error_t,error_r,error_f,deviation_f,runtime_s";

/// One method on one seed. Rates are percentages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub method: Method,
    pub seed: u64,
    pub accuracy: f64,
    pub f1: f64,
    pub error_t: f64,
    pub error_r: f64,
    pub error_f: f64,
    pub deviation_f: f64,
    pub runtime_s: f64,
}

impl ResultRow {
    pub fn from_report(method: Method, seed: u64, r: &MetricsReport) -> Self {
        Self {
            method,
            seed,
            accuracy: r.accuracy,
            f1: r.macro_f1,
            error_t: r.error_t,
            error_r: r.error_r,
            error_f: r.error_f,
            deviation_f: r.deviation_f,
            runtime_s: r.runtime_s,
        }
    }

    /// Numeric fields by column name, in file order.
    pub fn numeric_fields(&self) -> [(&'static str, f64); 7] {
        [
            ("accuracy", self.accuracy),
            ("f1", self.f1),
            ("error_t", self.error_t),
            ("error_r", self.error_r),
            ("error_f", self.error_f),
            ("deviation_f", self.deviation_f),
            ("runtime_s", self.runtime_s),
        ]
    }

    pub(crate) fn csv_cells(&self) -> String {
        format!(
            "{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.3}",
            self.method,
            self.seed,
            self.accuracy,
            self.f1,
            self.error_t,
            self.error_r,
            self.error_f,
            self.deviation_f,
            self.runtime_s
        )
    }
}

/// `results.csv` contents: fixed header, LF line endings.
pub fn results_csv(rows: &[ResultRow]) -> String {
    let mut out = String::from(RESULTS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_cells());
        out.push('\n');
    }
    out
}

fn write(path: &Path, contents: &str) -> Result<(), ExpError> {
    fs::write(path, contents).map_err(|e| Error::io(path, e).into())
}

/// Writes `results.csv`, `results.json` and one `loss_trace_<method>.csv`
/// per traced method into `dir` (created if needed).
pub fn write_artifacts(
    dir: &Path,
    rows: &[ResultRow],
    traces: &[(Method, Vec<f64>)],
) -> Result<(), ExpError> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write(&dir.join("results.csv"), &results_csv(rows))?;
    let json = serde_json::to_string_pretty(rows)
        .map_err(|e| ExpError::Runtime(Error::Input(e.to_string())))?;
    write(&dir.join("results.json"), &(json + "\n"))?;
    for (method, trace) in traces {
        let mut s = String::from("step,loss\n");
        for (i, l) in trace.iter().enumerate() {
            let _ = writeln!(s, "{},{:.12e}", i + 1, l);
        }
        write(&dir.join(format!("loss_trace_{method}.csv")), &s)?;
    }
    Ok(())
}

pub fn read_results_json(path: &Path) -> Result<Vec<ResultRow>, ExpError> {
    let text = fs::read_to_string(path)
        .map_err(|e| ExpError::Missing(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        ExpError::Runtime(Error::Parse {
            line: e.line() as u64,
            message: e.to_string(),
        })
    })
}
