use rayon::prelude::*;

use crate::dataforge::Dataset;
use crate::evalkit::evaluate;
use crate::numcore::{MlpArch, MlpModel, ParamVector};
use crate::rng::{stream, Stream};
use crate::{Error, Result, Scalar};

use super::{fedavg, local_train, ClientState, FederationConfig, ModelSnapshot, Role, RoundPlan};

#[derive(Debug, Clone, PartialEq)]
pub struct RoundRecord {
    pub round: usize,
    /// Global validation accuracy after aggregation, percent.
    pub val_accuracy: Option<f64>,
}

/// He-initialised starting point of federated pretraining for `seed`.
pub fn initial_params<S: Scalar>(arch: &MlpArch, seed: u64) -> ParamVector<S> {
    MlpModel::<S>::he(arch, &mut stream(seed, Stream::ModelInit, 0)).flatten()
}

fn check_ids<S>(clients: &mut [ClientState<S>]) -> Result<()> {
    clients.sort_by_key(|c| c.id);
    if let Some(w) = clients.windows(2).find(|w| w[0].id == w[1].id) {
        return Err(Error::Config(format!("duplicate client id {}", w[0].id)));
    }
    Ok(())
}

/// Broadcast, local training on every client, FedAvg; `plan.rounds` times.
/// Returns the final global parameters, the round log and the total number
/// of local steps taken.
pub fn run_rounds<S: Scalar>(
    arch: &MlpArch,
    start: &ParamVector<S>,
    clients: &mut [ClientState<S>],
    plan: &RoundPlan,
    val: Option<&Dataset<S>>,
) -> Result<(ParamVector<S>, Vec<RoundRecord>, u64)> {
    if clients.is_empty() {
        return Err(Error::Config(
            "federated rounds need at least one client".into(),
        ));
    }
    check_ids(clients)?;
    let mut global = start.clone();
    let mut log = Vec::with_capacity(plan.rounds);
    let mut steps = 0u64;
    for round in 0..plan.rounds {
        let train = |c: &mut ClientState<S>| {
            local_train(arch, &global, c, plan.local_steps, plan.batch_size)
        };
        let updates: Vec<(ParamVector<S>, usize)> = if plan.parallel {
            clients.par_iter_mut().map(train).collect::<Result<_>>()?
        } else {
            clients.iter_mut().map(train).collect::<Result<_>>()?
        };
        let contributions: Vec<(&ParamVector<S>, f64)> =
            updates.iter().map(|(p, n)| (p, *n as f64)).collect();
        global = fedavg(&contributions)?;
        steps += (plan.local_steps * clients.len()) as u64;
        let val_accuracy = match val {
            Some(v) => Some(evaluate(&MlpModel::from_params(arch, &global)?, v)?.accuracy),
            None => None,
        };
        log.push(RoundRecord {
            round,
            val_accuracy,
        });
    }
    Ok((global, log, steps))
}

/// Federated pretraining from [`initial_params`] on all `clients`.
pub fn pretrain<S: Scalar>(
    config: &FederationConfig,
    arch: &MlpArch,
    clients: &mut [ClientState<S>],
    val: Option<&Dataset<S>>,
) -> Result<ModelSnapshot<S>> {
    let start = initial_params(arch, config.seed);
    let (params, log, steps) = run_rounds(arch, &start, clients, &config.pretrain_plan(), val)?;
    let history = log.iter().filter_map(|r| r.val_accuracy).collect();
    Ok(ModelSnapshot::new(Role::Trained, arch.clone(), params, steps)?.with_history(history))
}

/// FedAvg fine-tuning of `start` over `retain_clients` only. Errors if the
/// target client is among them; any other client's data is never touched
/// here, so the target's read counter cannot move.
pub fn recover<S: Scalar>(
    start: &ModelSnapshot<S>,
    retain_clients: &mut [ClientState<S>],
    target_id: usize,
    plan: &RoundPlan,
) -> Result<ModelSnapshot<S>> {
    if let Some(c) = retain_clients.iter().find(|c| c.id == target_id) {
        return Err(Error::Isolation(format!(
            "client {} is the unlearning target and cannot take part in recovery",
            c.id
        )));
    }
    if plan.rounds == 0 {
        return Ok(start.clone());
    }
    let (params, _, steps) = run_rounds(start.arch(), start.params(), retain_clients, plan, None)?;
    Ok(ModelSnapshot::new(
        Role::Unlearned,
        start.arch().clone(),
        params,
        start.train_step_count() + steps,
    )?
    .with_loss_trace(start.loss_trace().to_vec()))
}
