use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::rng::{stream, Stream};
use crate::{Error, Result, Scalar};

use super::Dataset;

/// Train/validation/test fractions and shuffle seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train: f64,
    pub val: f64,
    pub test: f64,
    pub seed: u64,
}

impl SplitSpec {
    /// 70 / 10 / 20.
    pub fn standard(seed: u64) -> Self {
        Self {
            train: 0.70,
            val: 0.10,
            test: 0.20,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let f = [self.train, self.val, self.test];
        if f.iter().any(|&x| !(x > 0.0)) || (f.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::Input(format!(
                "split fractions must be positive and sum to 1, got {f:?}"
            )));
        }
        Ok(())
    }
}

/// Seeded shuffle, then `val = round(N*val)`, `test = round(N*test)` and
/// the remainder goes to train.
pub fn split<S: Scalar>(
    dataset: &Dataset<S>,
    spec: &SplitSpec,
) -> Result<(Dataset<S>, Dataset<S>, Dataset<S>)> {
    spec.validate()?;
    let n = dataset.len();
    if n < 10 {
        return Err(Error::Input(format!(
            "need at least 10 samples to split, got {n}"
        )));
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut stream(spec.seed, Stream::Split, 0));
    let n_val = (n as f64 * spec.val).round() as usize;
    let n_test = (n as f64 * spec.test).round() as usize;
    let n_train = n - n_val - n_test;
    let (tr, rest) = idx.split_at(n_train);
    let (va, te) = rest.split_at(n_val);
    Ok((dataset.subset(tr), dataset.subset(va), dataset.subset(te)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataforge::gen_blobs;
    use std::collections::BTreeSet;

    #[test]
    fn hundred_splits_70_10_20() {
        let ds = gen_blobs::<f64>(1, 100, 3, 2, 2.0).unwrap();
        let (a, b, c) = split(&ds, &SplitSpec::standard(5)).unwrap();
        assert_eq!((a.len(), b.len(), c.len()), (70, 10, 20));
        let all: BTreeSet<usize> = a
            .ids()
            .iter()
            .chain(b.ids())
            .chain(c.ids())
            .copied()
            .collect();
        assert_eq!(all.len(), 100);
        assert_eq!(all, (0..100).collect());
        let (a2, _, _) = split(&ds, &SplitSpec::standard(5)).unwrap();
        assert_eq!(a, a2);
    }

    #[test]
    fn rounding_remainder_goes_to_train() {
        let ds = gen_blobs::<f64>(1, 13, 3, 2, 2.0).unwrap();
        let (a, b, c) = split(&ds, &SplitSpec::standard(0)).unwrap();
        // round(1.3) = 1, round(2.6) = 3
        assert_eq!((a.len(), b.len(), c.len()), (9, 1, 3));
    }

    #[test]
    fn too_small_and_bad_fractions() {
        let ds = gen_blobs::<f64>(1, 9, 3, 2, 2.0).unwrap();
        assert!(split(&ds, &SplitSpec::standard(0)).is_err());
        let ds = gen_blobs::<f64>(1, 20, 3, 2, 2.0).unwrap();
        let bad = SplitSpec {
            train: 0.8,
            val: 0.1,
            test: 0.2,
            seed: 0,
        };
        assert!(split(&ds, &bad).is_err());
    }
}
