use std::fs;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::Error;

use super::run::simulate;
use super::{ExpError, ExperimentConfig, Method, ResultRow};

/// Frozen rows of every canonical seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenFile {
    pub seeds: Vec<u64>,
    pub methods: Vec<Method>,
    pub rows: Vec<ResultRow>,
}

/// The four qualitative orderings on one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingOutcome {
    pub seed: u64,
    /// Retraining forgets: `error_f(retrain) > error_f(origin)`.
    pub retrain_forgets: bool,
    /// `error_f(iff_fcu) > error_f(origin)`.
    pub iff_forgets: bool,
    /// `|deviation_f(iff_fcu)| <= |deviation_f(finetune)|`.
    pub iff_closer_than_finetune: bool,
    /// `error_r(grad_ascent) > error_r(iff_fcu)`.
    pub ascent_overforgets: bool,
}

impl OrderingOutcome {
    pub fn all(&self) -> bool {
        self.retrain_forgets
            && self.iff_forgets
            && self.iff_closer_than_finetune
            && self.ascent_overforgets
    }
}

#[derive(Debug, Clone)]
pub struct GoldenReport {
    pub rows: Vec<ResultRow>,
    pub orderings: Vec<OrderingOutcome>,
}

impl GoldenReport {
    pub fn passing_seeds(&self) -> usize {
        self.orderings.iter().filter(|o| o.all()).count()
    }
}

const ORDERING_METHODS: [Method; 5] = [
    Method::Origin,
    Method::Retrain,
    Method::Finetune,
    Method::GradAscent,
    Method::IffFcu,
];

/// Evaluates the orderings for every seed present in `rows`.
pub fn check_orderings(rows: &[ResultRow]) -> Result<Vec<OrderingOutcome>, ExpError> {
    let mut seeds: Vec<u64> = rows.iter().map(|r| r.seed).collect();
    seeds.dedup();
    seeds
        .into_iter()
        .map(|seed| {
            let get = |m: Method| {
                rows.iter()
                    .find(|r| r.seed == seed && r.method == m)
                    .ok_or_else(|| {
                        ExpError::Config(format!("orderings need a {m} row for seed {seed}"))
                    })
            };
            let (origin, retrain, finetune, ascent, iff) = (
                get(Method::Origin)?,
                get(Method::Retrain)?,
                get(Method::Finetune)?,
                get(Method::GradAscent)?,
                get(Method::IffFcu)?,
            );
            Ok(OrderingOutcome {
                seed,
                retrain_forgets: retrain.error_f > origin.error_f,
                iff_forgets: iff.error_f > origin.error_f,
                iff_closer_than_finetune: iff.deviation_f.abs() <= finetune.deviation_f.abs(),
                ascent_overforgets: ascent.error_r > iff.error_r,
            })
        })
        .collect()
}

fn run_seeds(config: &ExperimentConfig) -> Result<Vec<ResultRow>, ExpError> {
    config.validate()?;
    if config.golden.orderings {
        if let Some(m) = ORDERING_METHODS
            .iter()
            .find(|m| !config.methods.contains(m))
        {
            return Err(ExpError::Config(format!(
                "methods: golden orderings need {m}"
            )));
        }
    }
    let per_seed: Vec<Vec<ResultRow>> = config
        .golden
        .seeds
        .par_iter()
        .map(|&seed| {
            let cfg = ExperimentConfig {
                seed,
                ..config.clone()
            };
            simulate(&cfg).map(|o| o.rows)
        })
        .collect::<Result<_, _>>()?;
    Ok(per_seed.into_iter().flatten().collect())
}

/// Runs every canonical seed and writes the golden file.
pub fn golden_record(config: &ExperimentConfig) -> Result<GoldenFile, ExpError> {
    let rows = run_seeds(config)?;
    let file = GoldenFile {
        seeds: config.golden.seeds.clone(),
        methods: config.methods.clone(),
        rows,
    };
    let path = config.golden.path.clone();
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let json = serde_json::to_string_pretty(&file).expect("golden rows serialise");
    fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(file)
}

/// Re-runs the canonical seeds and compares against the golden file; wall
/// clock runtimes are not compared. With `golden.orderings` the orderings
/// must also hold on `golden.min_passing` seeds.
pub fn golden_check(config: &ExperimentConfig) -> Result<GoldenReport, ExpError> {
    let path = config.golden.path.clone();
    let text = fs::read_to_string(&path)
        .map_err(|e| ExpError::Missing(format!("golden file {}: {e}", path.display())))?;
    let golden: GoldenFile = serde_json::from_str(&text).map_err(|e| {
        ExpError::Runtime(Error::Parse {
            line: e.line() as u64,
            message: e.to_string(),
        })
    })?;
    let rows = run_seeds(config)?;
    compare(&golden.rows, &rows, config.golden.tolerance)?;
    let orderings = if config.golden.orderings {
        check_orderings(&rows)?
    } else {
        Vec::new()
    };
    let report = GoldenReport { rows, orderings };
    if config.golden.orderings && report.passing_seeds() < config.golden.min_passing {
        let failed: Vec<String> = report
            .orderings
            .iter()
            .filter(|o| !o.all())
            .map(|o| format!("{o:?}"))
            .collect();
        return Err(ExpError::Regression(format!(
            "orderings hold on {} of {} seeds, need {}: {}",
            report.passing_seeds(),
            report.orderings.len(),
            config.golden.min_passing,
            failed.join("; ")
        )));
    }
    Ok(report)
}

fn compare(golden: &[ResultRow], got: &[ResultRow], tol: f64) -> Result<(), ExpError> {
    if golden.len() != got.len() {
        return Err(ExpError::Regression(format!(
            "rows: golden has {}, run has {}",
            golden.len(),
            got.len()
        )));
    }
    for (i, (g, r)) in golden.iter().zip(got).enumerate() {
        if g.method != r.method {
            return Err(ExpError::Regression(format!(
                "rows[{i}].method: golden {}, got {}",
                g.method, r.method
            )));
        }
        if g.seed != r.seed {
            return Err(ExpError::Regression(format!(
                "rows[{i}].seed: golden {}, got {}",
                g.seed, r.seed
            )));
        }
        for ((name, a), (_, b)) in g.numeric_fields().iter().zip(r.numeric_fields()) {
            if *name == "runtime_s" {
                continue;
            }
            if !((a - b).abs() <= tol) {
                return Err(ExpError::Regression(format!(
                    "rows[{i}].{name} ({} seed {}): golden {a}, got {b}",
                    g.method, g.seed
                )));
            }
        }
    }
    Ok(())
}
