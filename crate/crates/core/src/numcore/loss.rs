use crate::{Error, Result, Scalar};

use super::Tensor;

/// Mean softmax cross-entropy over the batch and its gradient
/// `(softmax - onehot) / n` with respect to the logits.
pub fn loss_ce<S: Scalar>(logits: &Tensor<S>, labels: &[usize]) -> Result<(S, Tensor<S>)> {
    let n = logits.rows();
    let c = logits.cols();
    if labels.len() != n {
        return Err(Error::dim("loss_ce labels", n, labels.len()));
    }
    if let Some((i, &y)) = labels.iter().enumerate().find(|(_, &y)| y >= c) {
        return Err(Error::Input(format!(
            "label {y} at row {i} outside [0, {c})"
        )));
    }
    let inv_n = S::one() / S::from_usize_lossy(n);
    let mut total = S::zero();
    let mut grad = Vec::with_capacity(n * c);
    for (i, &y) in labels.iter().enumerate() {
        let row = logits.row(i);
        let max = row.iter().copied().fold(S::neg_infinity(), S::max);
        let sum: S = row.iter().map(|&z| (z - max).exp()).sum();
        let log_z = max + sum.ln();
        total = total + (log_z - row[y]);
        for (k, &z) in row.iter().enumerate() {
            let p = (z - log_z).exp();
            let t = if k == y { S::one() } else { S::zero() };
            grad.push((p - t) * inv_n);
        }
    }
    Ok((total * inv_n, Tensor::from_parts(vec![n, c], grad)))
}
