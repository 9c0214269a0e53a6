use std::fmt;
use std::str::FromStr;

use super::output::RESULTS_HEADER;
use super::{run_experiment, ExpError, ExperimentConfig, Method, ResultRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    AlphaMixup,
    PMixup,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::AlphaMixup => "alpha_mixup",
            SweepParam::PMixup => "p_mixup",
        }
    }

    fn apply(self, cfg: &mut ExperimentConfig, v: f64) {
        match self {
            SweepParam::AlphaMixup => cfg.unlearn.alpha_mixup = v,
            SweepParam::PMixup => cfg.unlearn.p_mixup = v,
        }
    }
}

impl FromStr for SweepParam {
    type Err = ExpError;

    fn from_str(s: &str) -> Result<Self, ExpError> {
        match s {
            "alpha_mixup" => Ok(SweepParam::AlphaMixup),
            "p_mixup" => Ok(SweepParam::PMixup),
            other => Err(ExpError::Config(format!(
                "sweep.param: expected alpha_mixup or p_mixup, got {other:?}"
            ))),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub param_value: f64,
    pub row: ResultRow,
}

/// One `iff_fcu` run per value (with the retrain gold standard alongside),
/// each in its own subdirectory of `output_dir`. Every value is validated
/// before the first run starts.
pub fn sweep(
    base: &ExperimentConfig,
    param: SweepParam,
    values: &[f64],
) -> Result<Vec<SweepRow>, ExpError> {
    if values.is_empty() {
        return Err(ExpError::Config("sweep.values: must not be empty".into()));
    }
    let mut configs = Vec::with_capacity(values.len());
    for (i, &v) in values.iter().enumerate() {
        let mut cfg = base.clone();
        cfg.methods = vec![Method::Retrain, Method::IffFcu];
        param.apply(&mut cfg, v);
        cfg.output_dir = base.output_dir.join(format!("sweep_{}_{i}", param.name()));
        cfg.validate()
            .map_err(|e| ExpError::Config(format!("sweep.values[{i}] = {v}: {}", inner(e))))?;
        configs.push((v, cfg));
    }
    configs
        .into_iter()
        .map(|(v, cfg)| {
            let out = run_experiment(&cfg)?;
            let row = out.row(Method::IffFcu).expect("iff_fcu requested").clone();
            Ok(SweepRow {
                param_value: v,
                row,
            })
        })
        .collect()
}

fn inner(e: ExpError) -> String {
    match e {
        ExpError::Config(m) => m,
        other => other.to_string(),
    }
}

/// `sweep.csv`: a `param_value` column followed by the results columns.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = format!("param_value,{RESULTS_HEADER}\n");
    for r in rows {
        out.push_str(&format!("{},{}\n", r.param_value, r.row.csv_cells()));
    }
    out
}
