use crate::dataforge::{dirichlet_partition, gen_blobs, load_csv, split, Dataset, SplitSpec};
use crate::evalkit::{full_report, timed, MethodModel};
use crate::fedsim::{
    build_clients, pretrain, recover, ClientState, FederationConfig, ModelSnapshot,
};
use crate::numcore::MlpArch;
use crate::unlearn::{
    downgraded_init, finetune_baseline, gradient_ascent_baseline, iff_unlearn, mcu_unlearn,
    retrain_oracle, AscentSettings,
};
use crate::{Error, Result};

use super::{
    write_artifacts, DatasetSource, ExpError, ExperimentConfig, Method, ResultRow, RuntimeClock,
};

type ExpResult<T> = std::result::Result<T, ExpError>;

/// Rows in the order of `config.methods`, plus the loss trace of every
/// method that produced one.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub rows: Vec<ResultRow>,
    pub traces: Vec<(Method, Vec<f64>)>,
    /// Validation accuracy of the global model after each pretraining round.
    pub pretrain_history: Vec<f64>,
}

impl ExperimentOutcome {
    pub fn row(&self, method: Method) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.method == method)
    }
}

/// Runs the whole pipeline and writes its artifacts under `output_dir`.
pub fn run_experiment(config: &ExperimentConfig) -> ExpResult<ExperimentOutcome> {
    let out = simulate(config)?;
    write_artifacts(&config.output_dir, &out.rows, &out.traces)?;
    Ok(out)
}

/// The pipeline without touching the filesystem (except to read a CSV
/// dataset).
pub fn simulate(config: &ExperimentConfig) -> ExpResult<ExperimentOutcome> {
    config.validate()?;
    Ok(pipeline(config)?)
}

fn load(config: &ExperimentConfig) -> Result<Dataset<f64>> {
    let d = &config.dataset;
    match d.source {
        DatasetSource::Blobs => gen_blobs(config.seed, d.n, d.d, d.c, d.separation),
        DatasetSource::Csv => load_csv(d.path.as_ref().expect("validated")),
    }
}

fn clock<T>(mode: RuntimeClock, f: impl FnOnce() -> T) -> (T, f64) {
    let (v, s) = timed(f);
    match mode {
        RuntimeClock::Wall => (v, s),
        RuntimeClock::Off => (v, 0.0),
    }
}

/// Fresh (no optimiser history) clients for every id except the target.
fn retain_clients(
    parts: &[Dataset<f64>],
    fed: &FederationConfig,
    target: usize,
) -> Result<Vec<ClientState<f64>>> {
    let mut clients = build_clients(parts, fed)?;
    clients.retain(|c| c.id != target);
    Ok(clients)
}

fn pipeline(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let seed = config.seed;
    let target = config.target_client_id;
    let fed = FederationConfig {
        seed,
        ..config.federation.clone()
    };
    let ucfg = &config.unlearn;
    let mode = config.runtime_clock;

    let data = load(config)?;
    let (train, val, test) = split(&data, &SplitSpec::standard(seed))?;
    let parts = dirichlet_partition(&train, fed.num_clients, fed.dirichlet_alpha, seed)?;
    let forget = &parts[target];
    let retain_parts: Vec<&Dataset<f64>> = parts
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != target)
        .map(|(_, p)| p)
        .collect();
    let retain = Dataset::concat(&retain_parts)?;

    let mut sizes = vec![data.dim()];
    sizes.extend_from_slice(&config.model.hidden);
    sizes.push(data.class_count());
    let arch = MlpArch::new(sizes)?;

    let mut clients = build_clients(&parts, &fed)?;
    let (origin, t_origin) = clock(mode, || pretrain(&fed, &arch, &mut clients, Some(&val)));
    let origin = origin?;
    let pretrain_history = origin.history().to_vec();

    let (gold, t_gold) = clock(mode, || -> Result<ModelSnapshot<f64>> {
        let mut rc = retain_clients(&parts, &fed, target)?;
        retrain_oracle(&fed, &arch, &mut rc, target, None)
    });
    let gold = gold?;

    let recovery = fed.recovery_plan();
    let recovered = |start: ModelSnapshot<f64>| -> Result<ModelSnapshot<f64>> {
        let mut rc = retain_clients(&parts, &fed, target)?;
        recover(&start, &mut rc, target, &recovery)
    };

    let mut computed: Vec<(Method, ModelSnapshot<f64>, f64)> = Vec::new();
    for &method in &config.methods {
        let (snap, secs) = match method {
            Method::Origin => (origin.clone(), t_origin),
            Method::Retrain => (gold.clone(), t_gold),
            Method::Finetune => {
                let (s, t) = clock(mode, || -> Result<_> {
                    let mut rc = retain_clients(&parts, &fed, target)?;
                    finetune_baseline(&origin, &mut rc, target, &recovery)
                });
                (s?, t)
            }
            Method::GradAscent => {
                let settings = AscentSettings {
                    steps: ucfg.unlearn_steps,
                    lr: fed.target_client_lr,
                    radius: ucfg.ascent_radius,
                    batch_size: ucfg.batch_size,
                    adam: fed.adam,
                    seed,
                };
                let (s, t) = clock(mode, || {
                    gradient_ascent_baseline(&origin, forget, &settings)
                });
                (s?, t)
            }
            Method::Mcu => {
                let down = downgraded_init(&arch, seed);
                let (s, t) = clock(mode, || {
                    recovered(mcu_unlearn(&origin, &down, forget, ucfg, fed.adam, seed)?)
                });
                (s?, t)
            }
            Method::IffFcu => {
                let down = downgraded_init(&arch, seed);
                let (s, t) = clock(mode, || {
                    recovered(iff_unlearn(
                        &origin, &down, forget, &retain, ucfg, fed.adam, seed,
                    )?)
                });
                (s?, t)
            }
        };
        computed.push((method, snap, secs));
    }

    let mut models: Vec<MethodModel<'_, f64>> = computed
        .iter()
        .map(|(m, s, t)| MethodModel {
            method: m.name().to_string(),
            snapshot: s,
            runtime_s: *t,
        })
        .collect();
    // the gold standard always anchors deviation, reported or not
    if !config.methods.contains(&Method::Retrain) {
        models.insert(
            0,
            MethodModel {
                method: Method::Retrain.name().to_string(),
                snapshot: &gold,
                runtime_s: t_gold,
            },
        );
    }
    let reports = full_report(&models, &test, &retain, forget)?;

    let mut rows = Vec::with_capacity(config.methods.len());
    for (name, rep) in &reports {
        let method = Method::parse(name).expect("method names round-trip");
        if config.methods.contains(&method) && rows.iter().all(|r: &ResultRow| r.method != method) {
            rows.push(ResultRow::from_report(method, seed, rep));
        }
    }
    if let Some(r) = rows
        .iter()
        .find(|r| r.numeric_fields().iter().any(|(_, v)| !v.is_finite()))
    {
        return Err(Error::Input(format!(
            "non-finite metric in row for {}",
            r.method
        )));
    }
    let traces = computed
        .iter()
        .filter(|(_, s, _)| !s.loss_trace().is_empty())
        .map(|(m, s, _)| (*m, s.loss_trace().to_vec()))
        .collect();
    Ok(ExperimentOutcome {
        rows,
        traces,
        pretrain_history,
    })
}
