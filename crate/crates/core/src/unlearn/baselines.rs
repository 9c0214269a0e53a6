use rand::Rng;

use crate::dataforge::Dataset;
use crate::fedsim::{
    pretrain, recover, ClientState, FederationConfig, ModelSnapshot, Role, RoundPlan,
};
use crate::numcore::{loss_ce, AdamConfig, AdamState, MlpArch, MlpModel, ParamVector, Upstream};
use crate::rng::{stream, Stream};
use crate::{Error, Result, Scalar};

/// Gold standard: full federated pretraining on the retain clients only.
pub fn retrain_oracle<S: Scalar>(
    config: &FederationConfig,
    arch: &MlpArch,
    retain_clients: &mut [ClientState<S>],
    target_id: usize,
    val: Option<&Dataset<S>>,
) -> Result<ModelSnapshot<S>> {
    if retain_clients.iter().any(|c| c.id == target_id) {
        return Err(Error::Isolation(format!(
            "retraining set includes target client {target_id}"
        )));
    }
    pretrain(config, arch, retain_clients, val)?.relabel(Role::Retrained)
}

/// FedAvg fine-tuning of the trained model on the retain clients; the same
/// engine as recovery.
pub fn finetune_baseline<S: Scalar>(
    m_tr: &ModelSnapshot<S>,
    retain_clients: &mut [ClientState<S>],
    target_id: usize,
    plan: &RoundPlan,
) -> Result<ModelSnapshot<S>> {
    recover(m_tr, retain_clients, target_id, plan)
}

/// Settings of [`gradient_ascent_baseline`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentSettings {
    pub steps: usize,
    pub lr: f64,
    /// Radius of the L2 ball around the trained parameters.
    pub radius: f64,
    pub batch_size: usize,
    pub adam: AdamConfig,
    pub seed: u64,
}

/// Projected gradient ascent on the forget-set cross-entropy. After every
/// Adam step on the negated gradient the displacement from the trained
/// parameters is rescaled onto the radius-`radius` sphere if it left the
/// ball.
pub fn gradient_ascent_baseline<S: Scalar>(
    m_tr: &ModelSnapshot<S>,
    forget: &Dataset<S>,
    s: &AscentSettings,
) -> Result<ModelSnapshot<S>> {
    if !(s.radius >= 0.0) || !s.radius.is_finite() {
        return Err(Error::Input(format!(
            "ascent radius must be >= 0, got {}",
            s.radius
        )));
    }
    if s.radius == 0.0 || s.steps == 0 {
        return Ok(m_tr.clone());
    }
    if forget.is_empty() {
        return Err(Error::Input("forget set is empty".into()));
    }
    if s.batch_size == 0 {
        return Err(Error::Input("batch size must be >= 1".into()));
    }
    let arch = m_tr.arch();
    let anchor = m_tr.params();
    let radius = S::lit(s.radius);
    let mut params = anchor.clone();
    let mut opt = AdamState::new(params.len(), s.adam);
    let mut rng = stream(s.seed, Stream::Ascent, 0);
    let mut idx = vec![0usize; s.batch_size];
    let mut trace = Vec::with_capacity(s.steps);
    for _ in 0..s.steps {
        for slot in idx.iter_mut() {
            *slot = rng.random_range(0..forget.len());
        }
        let (x, y) = forget.gather(&idx);
        let model = MlpModel::from_params(arch, &params)?;
        let fwd = model.forward_trace(&x)?;
        let (loss, dlogits) = loss_ce(&fwd.logits(), &y)?;
        let grad = model.backprop_trace(&fwd, Upstream::Logits(&dlogits))?;
        let ascent = ParamVector::new(grad.as_slice().iter().map(|&g| -g).collect());
        opt.step(&mut params, &ascent, s.lr)?;
        project_onto_ball(&mut params, anchor, radius);
        trace.push(loss.as_f64());
    }
    let steps = m_tr.train_step_count() + s.steps as u64;
    Ok(ModelSnapshot::new(Role::Unlearned, arch.clone(), params, steps)?.with_loss_trace(trace))
}

fn project_onto_ball<S: Scalar>(params: &mut ParamVector<S>, center: &ParamVector<S>, radius: S) {
    let dist = params.l2_distance(center).expect("same architecture");
    if dist > radius {
        let k = radius / dist;
        for (p, &c) in params.as_mut_slice().iter_mut().zip(center.as_slice()) {
            *p = c + (*p - c) * k;
        }
    }
}
