use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::numcore::Tensor;
use crate::rng::{stream, Stream};
use crate::{Error, Result, Scalar};

use super::Dataset;

/// `c` unit-covariance Gaussian clusters in `d` dimensions.
///
/// When `c <= d` the means are `separation / sqrt(2) * e_k`, so every pair is
/// exactly `separation` apart. Otherwise the means are random Gaussian points
/// rescaled until the closest pair is `separation` apart. Class counts differ
/// by at most one.
pub fn gen_blobs<S: Scalar>(
    seed: u64,
    n: usize,
    d: usize,
    c: usize,
    separation: f64,
) -> Result<Dataset<S>> {
    if c < 2 || n < c || d < 2 || !(separation > 0.0) || !separation.is_finite() {
        return Err(Error::Input(format!(
            "infeasible blobs parameters: need n >= c >= 2, d >= 2, separation > 0 (n={n}, d={d}, c={c}, separation={separation})"
        )));
    }
    let mut rng = stream(seed, Stream::Data, 0);
    let means = cluster_means(c, d, separation, &mut rng);

    let mut labels: Vec<usize> = (0..n).map(|i| i % c).collect();
    labels.shuffle(&mut rng);
    let mut values = Vec::with_capacity(n * d);
    for &y in &labels {
        for mu in &means[y] {
            let z: f64 = rng.sample(StandardNormal);
            values.push(S::lit(mu + z));
        }
    }
    Dataset::new(Tensor::new(vec![n, d], values)?, labels, c)
}

fn cluster_means<R: Rng>(c: usize, d: usize, separation: f64, rng: &mut R) -> Vec<Vec<f64>> {
    if c <= d {
        let r = separation / std::f64::consts::SQRT_2;
        return (0..c)
            .map(|k| (0..d).map(|j| if j == k { r } else { 0.0 }).collect())
            .collect();
    }
    loop {
        let pts: Vec<Vec<f64>> = (0..c)
            .map(|_| {
                (0..d)
                    .map(|_| rng.sample::<f64, _>(StandardNormal))
                    .collect()
            })
            .collect();
        let mut min = f64::INFINITY;
        for i in 0..c {
            for j in i + 1..c {
                let dist = pts[i]
                    .iter()
                    .zip(&pts[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                min = min.min(dist);
            }
        }
        if min > 1e-6 {
            // a touch above 1 so rounding cannot put a pair just under `separation`
            let scale = separation / min * (1.0 + 1e-12);
            return pts
                .into_iter()
                .map(|p| p.into_iter().map(|x| x * scale).collect())
                .collect();
        }
    }
}
