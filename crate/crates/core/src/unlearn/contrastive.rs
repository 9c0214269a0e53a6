use rand::Rng;

use crate::dataforge::{build_mix_batch, Dataset, MixedBatch};
use crate::fedsim::{ModelSnapshot, Role};
use crate::numcore::{AdamConfig, AdamState, MlpArch, MlpModel, Tensor, Upstream};
use crate::rng::{stream, Stream};
use crate::{Error, Result, Scalar};

use super::{fgmp_blend, fusion_loss_batch, UnlearnConfig};

/// Weight standard deviation of the downgraded anchor.
pub const DOWNGRADED_STD: f64 = 0.05;

/// A never-trained model: Gaussian weights (std [`DOWNGRADED_STD`]), zero
/// biases.
pub fn downgraded_init<S: Scalar>(arch: &MlpArch, seed: u64) -> ModelSnapshot<S> {
    let model = MlpModel::<S>::gaussian(
        arch,
        DOWNGRADED_STD,
        &mut stream(seed, Stream::Downgraded, 0),
    );
    ModelSnapshot::new(Role::Downgraded, arch.clone(), model.flatten(), 0)
        .expect("fresh downgraded snapshot")
}

/// Mixup-fused contrastive unlearning with periodic FGMP.
///
/// Each step draws a forget mini-batch (with replacement), builds a mixed
/// batch against `retain_pool`, and takes one Adam step on the mean fusion
/// loss through the working model's feature head. The trained and
/// downgraded snapshots stay frozen. Mini-batch and mixing draws use
/// separate streams, so `p_mixup = 0` follows exactly the trajectory of
/// [`mcu_unlearn`] under the same seed.
pub fn iff_unlearn<S: Scalar>(
    m_tr: &ModelSnapshot<S>,
    m_down: &ModelSnapshot<S>,
    forget: &Dataset<S>,
    retain_pool: &Dataset<S>,
    cfg: &UnlearnConfig,
    adam: AdamConfig,
    seed: u64,
) -> Result<ModelSnapshot<S>> {
    if retain_pool.is_empty() {
        return Err(Error::Input("retain pool is empty".into()));
    }
    if retain_pool.dim() != forget.dim() {
        return Err(Error::dim(
            "retain pool width",
            forget.dim(),
            retain_pool.dim(),
        ));
    }
    let pool = retain_pool.features();
    let mut mix_rng = stream(seed, Stream::UnlearnMix, 0);
    contrastive_loop(m_tr, m_down, forget, cfg, adam, seed, |xf| {
        build_mix_batch(xf, pool, cfg.alpha_mixup, cfg.p_mixup, &mut mix_rng)
    })
}

/// Vanilla model-contrastive unlearning: the loop of [`iff_unlearn`] on the
/// raw forget samples, every sample pulled toward the downgraded anchor.
pub fn mcu_unlearn<S: Scalar>(
    m_tr: &ModelSnapshot<S>,
    m_down: &ModelSnapshot<S>,
    forget: &Dataset<S>,
    cfg: &UnlearnConfig,
    adam: AdamConfig,
    seed: u64,
) -> Result<ModelSnapshot<S>> {
    contrastive_loop(m_tr, m_down, forget, cfg, adam, seed, |xf| {
        Ok(MixedBatch::unmixed(xf))
    })
}

fn contrastive_loop<S: Scalar>(
    m_tr: &ModelSnapshot<S>,
    m_down: &ModelSnapshot<S>,
    forget: &Dataset<S>,
    cfg: &UnlearnConfig,
    adam: AdamConfig,
    seed: u64,
    mut make_batch: impl FnMut(&Tensor<S>) -> Result<MixedBatch<S>>,
) -> Result<ModelSnapshot<S>> {
    cfg.validate()?;
    if forget.is_empty() {
        return Err(Error::Input("forget set is empty".into()));
    }
    if m_tr.arch() != m_down.arch() {
        return Err(Error::Input(
            "trained and downgraded anchors differ in architecture".into(),
        ));
    }
    let arch = m_tr.arch();
    let trained = m_tr.model();
    let downgraded = m_down.model();
    let mut params = m_tr.params().clone();
    let mut opt = AdamState::new(params.len(), adam);
    let mut batch_rng = stream(seed, Stream::UnlearnBatch, 0);
    let mut idx = vec![0usize; cfg.batch_size];
    let mut trace = Vec::with_capacity(cfg.unlearn_steps);

    for step in 1..=cfg.unlearn_steps {
        for slot in idx.iter_mut() {
            *slot = batch_rng.random_range(0..forget.len());
        }
        let (xf, _) = forget.gather(&idx);
        let batch = make_batch(&xf)?;
        let (z_tr, _) = trained.forward(&batch.x_mix)?;
        let (z_down, _) = downgraded.forward(&batch.x_mix)?;
        let working = MlpModel::from_params(arch, &params)?;
        let fwd = working.forward_trace(&batch.x_mix)?;
        let (loss, dz) = fusion_loss_batch(
            &fwd.features(),
            &z_tr,
            &z_down,
            &batch.pseudo_label,
            cfg.tau,
        )?;
        let grad = working.backprop_trace(&fwd, Upstream::Features(&dz))?;
        opt.step(&mut params, &grad, cfg.unlearn_lr)?;
        if step % cfg.fgmp_period == 0 {
            params = fgmp_blend(&params, m_tr.params(), arch, cfg.fgmp_low_fraction)?;
        }
        let loss = loss.as_f64();
        if !loss.is_finite() || !params.all_finite() {
            return Err(Error::Input(format!("unlearning diverged at step {step}")));
        }
        trace.push(loss);
    }
    let steps = m_tr.train_step_count() + cfg.unlearn_steps as u64;
    Ok(ModelSnapshot::new(Role::Unlearned, arch.clone(), params, steps)?.with_loss_trace(trace))
}
