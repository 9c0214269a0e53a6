use crate::dataforge::PseudoLabel;
use crate::numcore::{cosine_sim_grad, Tensor};
use crate::{Error, Result, Scalar};

/// Features of one mixed sample under the working, trained and downgraded
/// models. Only `z_mix` receives a gradient.
#[derive(Debug, Clone, Copy)]
pub struct FeatureTriple<'a, S> {
    pub z_mix: &'a [S],
    pub z_tr: &'a [S],
    pub z_down: &'a [S],
}

/// `ln(1 + e^x)` without overflow.
fn softplus<S: Scalar>(x: S) -> S {
    x.max(S::zero()) + (-x.abs()).exp().ln_1p()
}

fn sigmoid<S: Scalar>(x: S) -> S {
    if x >= S::zero() {
        S::one() / (S::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (S::one() + e)
    }
}

/// Two-way contrastive loss on one feature triple and its gradient in `z_mix`.
///
/// With `s_d = cos(z_mix, z_down) / tau` and `s_t = cos(z_mix, z_tr) / tau`,
/// the positive logit is `s_d` for [`PseudoLabel::Erase`] and `s_t` for
/// [`PseudoLabel::Retain`]; the loss is `-log softmax(positive)` over
/// `{s_d, s_t}`, i.e. `softplus(negative - positive)`.
pub fn fusion_loss<S: Scalar>(
    t: FeatureTriple<'_, S>,
    tau: f64,
    label: PseudoLabel,
) -> Result<(S, Vec<S>)> {
    if !(tau > 0.0) {
        return Err(Error::Input(format!("temperature must be > 0, got {tau}")));
    }
    if t.z_tr.len() != t.z_mix.len() || t.z_down.len() != t.z_mix.len() {
        return Err(Error::dim(
            "feature triple",
            t.z_mix.len(),
            format!("z_tr {} / z_down {}", t.z_tr.len(), t.z_down.len()),
        ));
    }
    let inv_tau = S::lit(1.0 / tau);
    let (cos_d, g_d) = cosine_sim_grad(t.z_mix, t.z_down)?;
    let (cos_t, g_t) = cosine_sim_grad(t.z_mix, t.z_tr)?;
    let (s_d, s_t) = (cos_d * inv_tau, cos_t * inv_tau);
    let (margin, g_pos, g_neg) = match label {
        PseudoLabel::Erase => (s_t - s_d, &g_d, &g_t),
        PseudoLabel::Retain => (s_d - s_t, &g_t, &g_d),
    };
    let loss = softplus(margin);
    // dL/d margin = sigmoid(margin); d margin/dz = (grad_neg - grad_pos) / tau
    let w = sigmoid(margin) * inv_tau;
    let grad = g_neg
        .iter()
        .zip(g_pos)
        .map(|(&n, &p)| w * (n - p))
        .collect();
    Ok((loss, grad))
}

/// Mean of [`fusion_loss`] over the rows of a batch, with the gradient of
/// that mean with respect to every row of `z_mix`.
pub fn fusion_loss_batch<S: Scalar>(
    z_mix: &Tensor<S>,
    z_tr: &Tensor<S>,
    z_down: &Tensor<S>,
    labels: &[PseudoLabel],
    tau: f64,
) -> Result<(S, Tensor<S>)> {
    let n = z_mix.rows();
    if z_tr.shape() != z_mix.shape() || z_down.shape() != z_mix.shape() {
        return Err(Error::dim(
            "fusion batch",
            format!("{:?}", z_mix.shape()),
            format!("z_tr {:?} / z_down {:?}", z_tr.shape(), z_down.shape()),
        ));
    }
    if labels.len() != n {
        return Err(Error::dim("fusion batch labels", n, labels.len()));
    }
    let inv_n = S::one() / S::from_usize_lossy(n);
    let mut total = S::zero();
    let mut grad = Vec::with_capacity(z_mix.values().len());
    for (i, &label) in labels.iter().enumerate() {
        let triple = FeatureTriple {
            z_mix: z_mix.row(i),
            z_tr: z_tr.row(i),
            z_down: z_down.row(i),
        };
        let (l, g) = fusion_loss(triple, tau, label)?;
        total = total + l;
        grad.extend(g.into_iter().map(|v| v * inv_n));
    }
    Ok((total * inv_n, Tensor::new(z_mix.shape().to_vec(), grad)?))
}
