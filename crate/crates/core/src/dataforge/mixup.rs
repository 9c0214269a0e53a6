use rand::Rng;

use crate::numcore::Tensor;
use crate::{Error, Result, Scalar};

use super::sample_beta;

/// Contrastive pseudo-label of a mixed sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum PseudoLabel {
    /// `lambda <= 0.5`: mostly retain content, anchored to the trained model.
    Retain = 0,
    /// `lambda > 0.5`: mostly forget content, pulled to the downgraded model.
    Erase = 1,
}

impl PseudoLabel {
    pub fn from_lambda(lambda: f64) -> Self {
        if lambda > 0.5 {
            PseudoLabel::Erase
        } else {
            PseudoLabel::Retain
        }
    }

    pub fn as_u8(self) -> u8 {
        self as u8
    }
}

/// Interpolated inputs `x_mix = lambda * x_f + (1 - lambda) * x_r` with their
/// coefficients, pseudo-labels and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedBatch<S> {
    pub x_mix: Tensor<S>,
    pub lambda: Vec<S>,
    pub pseudo_label: Vec<PseudoLabel>,
    /// Row of the forget batch each sample came from.
    pub forget_idx: Vec<usize>,
    /// Retain-pool row paired with each sample; `None` when the gate was off.
    pub retain_idx: Vec<Option<usize>>,
    /// Whether the mixup gate fired for this batch.
    pub mixed: bool,
}

impl<S: Scalar> MixedBatch<S> {
    /// The raw forget samples, `lambda = 1`, pseudo-label 1.
    pub fn unmixed(forget_batch: &Tensor<S>) -> Self {
        let n = forget_batch.rows();
        Self {
            x_mix: forget_batch.clone(),
            lambda: vec![S::one(); n],
            pseudo_label: vec![PseudoLabel::Erase; n],
            forget_idx: (0..n).collect(),
            retain_idx: vec![None; n],
            mixed: false,
        }
    }

    /// Mixes forget row `i` with retain row `partners[i]` at `lambdas[i]`.
    pub fn interpolate(
        forget_batch: &Tensor<S>,
        retain_pool: &Tensor<S>,
        partners: &[usize],
        lambdas: &[S],
    ) -> Result<Self> {
        let n = forget_batch.rows();
        let d = forget_batch.cols();
        if retain_pool.cols() != d {
            return Err(Error::dim("mixup retain pool width", d, retain_pool.cols()));
        }
        if partners.len() != n || lambdas.len() != n {
            return Err(Error::dim(
                "mixup pairing",
                n,
                format!("{} partners / {} lambdas", partners.len(), lambdas.len()),
            ));
        }
        if let Some(&p) = partners.iter().find(|&&p| p >= retain_pool.rows()) {
            return Err(Error::Input(format!(
                "retain partner {p} outside pool of {}",
                retain_pool.rows()
            )));
        }
        if let Some(l) = lambdas
            .iter()
            .find(|l| !(**l >= S::zero() && **l <= S::one()))
        {
            return Err(Error::Input(format!(
                "mixing coefficient {l} outside [0, 1]"
            )));
        }
        let mut values = Vec::with_capacity(n * d);
        for i in 0..n {
            let l = lambdas[i];
            let xf = forget_batch.row(i);
            let xr = retain_pool.row(partners[i]);
            values.extend(xf.iter().zip(xr).map(|(&f, &r)| l * f + (S::one() - l) * r));
        }
        Ok(Self {
            x_mix: Tensor::new(vec![n, d], values)?,
            lambda: lambdas.to_vec(),
            pseudo_label: lambdas
                .iter()
                .map(|l| PseudoLabel::from_lambda(l.as_f64()))
                .collect(),
            forget_idx: (0..n).collect(),
            retain_idx: partners.iter().map(|&p| Some(p)).collect(),
            mixed: true,
        })
    }

    pub fn len(&self) -> usize {
        self.lambda.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambda.is_empty()
    }
}

/// Draws one Bernoulli(`p_mixup`) gate for the whole batch. Gate off: the
/// forget samples pass through unchanged ([`MixedBatch::unmixed`]). Gate on:
/// each forget row gets a retain partner drawn uniformly with replacement and
/// its own `lambda ~ Beta(alpha_mixup, alpha_mixup)`.
pub fn build_mix_batch<S: Scalar, R: Rng + ?Sized>(
    forget_batch: &Tensor<S>,
    retain_pool: &Tensor<S>,
    alpha_mixup: f64,
    p_mixup: f64,
    rng: &mut R,
) -> Result<MixedBatch<S>> {
    if retain_pool.cols() != forget_batch.cols() {
        return Err(Error::dim(
            "mixup retain pool width",
            forget_batch.cols(),
            retain_pool.cols(),
        ));
    }
    if !(0.0..=1.0).contains(&p_mixup) {
        return Err(Error::Input(format!(
            "p_mixup must lie in [0, 1], got {p_mixup}"
        )));
    }
    if !(alpha_mixup > 0.0) {
        return Err(Error::Input(format!(
            "alpha_mixup must be > 0, got {alpha_mixup}"
        )));
    }
    if !rng.random_bool(p_mixup) {
        return Ok(MixedBatch::unmixed(forget_batch));
    }
    let n = forget_batch.rows();
    let pool = retain_pool.rows();
    let mut partners = Vec::with_capacity(n);
    let mut lambdas = Vec::with_capacity(n);
    for _ in 0..n {
        partners.push(rng.random_range(0..pool));
        lambdas.push(S::lit(sample_beta(alpha_mixup, rng)?));
    }
    MixedBatch::interpolate(forget_batch, retain_pool, &partners, &lambdas)
}
