use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::numcore::Tensor;
use crate::{Error, Result, Scalar};

/// Labelled samples with stable sample ids and a shared read counter.
///
/// Every accessor that exposes features or labels bumps the counter; clones
/// share it, so the counter audits all reads of the underlying data no matter
/// which copy they went through. Metadata (`len`, `dim`, `ids`) is free.
#[derive(Debug, Clone)]
pub struct Dataset<S> {
    features: Tensor<S>,
    labels: Vec<usize>,
    class_count: usize,
    ids: Vec<usize>,
    reads: Arc<AtomicU64>,
}

impl<S: Scalar> PartialEq for Dataset<S> {
    fn eq(&self, other: &Self) -> bool {
        self.features == other.features
            && self.labels == other.labels
            && self.class_count == other.class_count
            && self.ids == other.ids
    }
}

impl<S: Scalar> Dataset<S> {
    /// Samples get ids `0..N`.
    pub fn new(features: Tensor<S>, labels: Vec<usize>, class_count: usize) -> Result<Self> {
        let ids = (0..labels.len()).collect();
        Self::with_ids(features, labels, class_count, ids)
    }

    pub fn with_ids(
        features: Tensor<S>,
        labels: Vec<usize>,
        class_count: usize,
        ids: Vec<usize>,
    ) -> Result<Self> {
        if features.shape().len() != 2 {
            return Err(Error::dim(
                "dataset features",
                "2-d tensor",
                format!("{:?}", features.shape()),
            ));
        }
        if labels.len() != features.rows() {
            return Err(Error::dim("dataset labels", features.rows(), labels.len()));
        }
        if ids.len() != labels.len() {
            return Err(Error::dim("dataset ids", labels.len(), ids.len()));
        }
        if let Some(&y) = labels.iter().find(|&&y| y >= class_count) {
            return Err(Error::Input(format!(
                "label {y} outside [0, {class_count})"
            )));
        }
        Ok(Self {
            features,
            labels,
            class_count,
            ids,
            reads: Arc::new(AtomicU64::new(0)),
        })
    }

    fn touch(&self) {
        self.reads.fetch_add(1, Ordering::Relaxed);
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    pub fn class_count(&self) -> usize {
        self.class_count
    }

    pub fn ids(&self) -> &[usize] {
        &self.ids
    }

    /// Number of data accesses recorded so far (shared by all clones).
    pub fn reads(&self) -> u64 {
        self.reads.load(Ordering::Relaxed)
    }

    pub fn features(&self) -> &Tensor<S> {
        self.touch();
        &self.features
    }

    pub fn labels(&self) -> &[usize] {
        self.touch();
        &self.labels
    }

    /// Rows at `idx` (repeats allowed) and their labels.
    pub fn gather(&self, idx: &[usize]) -> (Tensor<S>, Vec<usize>) {
        self.touch();
        let x = self.features.select_rows(idx);
        let y = idx.iter().map(|&i| self.labels[i]).collect();
        (x, y)
    }

    /// Per-class sample counts.
    pub fn class_histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.class_count];
        for &y in &self.labels {
            h[y] += 1;
        }
        h
    }

    /// New dataset (with a fresh counter) holding the rows at `idx`.
    pub fn subset(&self, idx: &[usize]) -> Self {
        self.touch();
        Self {
            features: self.features.select_rows(idx),
            labels: idx.iter().map(|&i| self.labels[i]).collect(),
            class_count: self.class_count,
            ids: idx.iter().map(|&i| self.ids[i]).collect(),
            reads: Arc::new(AtomicU64::new(0)),
        }
    }

    /// Row-wise union of several datasets, in the order given.
    pub fn concat(parts: &[&Self]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::Input("concat of zero datasets".into()))?;
        let d = first.dim();
        let mut values = Vec::new();
        let mut labels = Vec::new();
        let mut ids = Vec::new();
        let mut class_count = 0;
        for p in parts {
            if p.dim() != d {
                return Err(Error::dim("concat", d, p.dim()));
            }
            p.touch();
            values.extend_from_slice(p.features.values());
            labels.extend_from_slice(&p.labels);
            ids.extend_from_slice(&p.ids);
            class_count = class_count.max(p.class_count);
        }
        let n = labels.len();
        Self::with_ids(Tensor::new(vec![n, d], values)?, labels, class_count, ids)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> Dataset<f64> {
        let x = Tensor::from_rows(&[vec![0.0, 1.0], vec![2.0, 3.0], vec![4.0, 5.0]]).unwrap();
        Dataset::new(x, vec![0, 1, 1], 2).unwrap()
    }

    #[test]
    fn validation() {
        let x = Tensor::from_rows(&[vec![0.0, 1.0]]).unwrap();
        assert!(Dataset::new(x.clone(), vec![2], 2).is_err());
        assert!(Dataset::new(x, vec![0, 1], 2).is_err());
    }

    #[test]
    fn read_counter_is_shared_by_clones() {
        let d = tiny();
        let c = d.clone();
        assert_eq!(d.reads(), 0);
        let _ = d.len() + d.dim() + d.ids().len();
        assert_eq!(d.reads(), 0);
        let _ = c.gather(&[0, 0]);
        let _ = c.features();
        assert_eq!(d.reads(), 2);
        let sub = d.subset(&[2]);
        assert_eq!(d.reads(), 3);
        assert_eq!(sub.reads(), 0);
        assert_eq!(sub.ids(), &[2]);
    }

    #[test]
    fn concat_keeps_ids() {
        let d = tiny();
        let (a, b) = (d.subset(&[2]), d.subset(&[0, 1]));
        let u = Dataset::concat(&[&a, &b]).unwrap();
        assert_eq!(u.ids(), &[2, 0, 1]);
        assert_eq!(u.class_histogram(), vec![1, 2]);
    }
}
