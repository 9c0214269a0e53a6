use rand::seq::SliceRandom;
use rand::Rng;

use crate::rng::{stream, Stream};
use crate::{Error, Result, Scalar};

use super::{sample_ln_gamma, Dataset};

/// Proportion redraws before giving up on non-empty clients.
pub const MAX_PARTITION_ATTEMPTS: usize = 100;

/// Integer allocation of `total` items by `weights` (non-negative, summing
/// to one): floors first, then the leftover units go to the largest
/// fractional parts, ties to the lower index.
pub fn largest_remainder(total: usize, weights: &[f64]) -> Vec<usize> {
    let raw: Vec<f64> = weights.iter().map(|w| w * total as f64).collect();
    let mut counts: Vec<usize> = raw.iter().map(|r| r.floor() as usize).collect();
    let assigned: usize = counts.iter().sum();
    let mut order: Vec<usize> = (0..weights.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = raw[a] - raw[a].floor();
        let fb = raw[b] - raw[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    for &k in order.iter().take(total.saturating_sub(assigned)) {
        counts[k] += 1;
    }
    counts
}

fn dirichlet<R: Rng>(k: usize, alpha: f64, rng: &mut R) -> Result<Vec<f64>> {
    let logs = (0..k)
        .map(|_| sample_ln_gamma(alpha, rng))
        .collect::<Result<Vec<_>>>()?;
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let s: f64 = w.iter().sum();
    Ok(w.into_iter().map(|x| x / s).collect())
}

/// Non-IID split of `train` across `k` clients: per class (ascending), a
/// proportion vector `p ~ Dirichlet(alpha * 1_k)` allocates that class's
/// shuffled samples by largest remainder. Redraws everything up to
/// [`MAX_PARTITION_ATTEMPTS`] times until no client is empty.
pub fn dirichlet_partition<S: Scalar>(
    train: &Dataset<S>,
    k: usize,
    alpha: f64,
    seed: u64,
) -> Result<Vec<Dataset<S>>> {
    if k == 0 {
        return Err(Error::Input("need at least one client".into()));
    }
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::Input(format!(
            "dirichlet alpha must be > 0, got {alpha}"
        )));
    }
    if train.len() < k {
        return Err(Error::Partition(format!(
            "{} samples cannot fill {k} clients",
            train.len()
        )));
    }
    let labels = train.labels().to_vec();
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); train.class_count()];
    for (i, &y) in labels.iter().enumerate() {
        by_class[y].push(i);
    }

    let mut rng = stream(seed, Stream::Partition, 0);
    for _ in 0..MAX_PARTITION_ATTEMPTS {
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); k];
        for members in &by_class {
            if members.is_empty() {
                continue;
            }
            let p = dirichlet(k, alpha, &mut rng)?;
            let counts = largest_remainder(members.len(), &p);
            let mut shuffled = members.clone();
            shuffled.shuffle(&mut rng);
            let mut off = 0;
            for (bucket, &c) in buckets.iter_mut().zip(&counts) {
                bucket.extend_from_slice(&shuffled[off..off + c]);
                off += c;
            }
        }
        if buckets.iter().all(|b| !b.is_empty()) {
            return Ok(buckets
                .into_iter()
                .map(|mut b| {
                    b.sort_unstable();
                    train.subset(&b)
                })
                .collect());
        }
    }
    Err(Error::Partition(format!(
        "no draw gave {k} non-empty clients in {MAX_PARTITION_ATTEMPTS} attempts (alpha={alpha})"
    )))
}
