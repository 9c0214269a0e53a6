use crate::dataforge::Dataset;
use crate::numcore::MlpModel;
use crate::{Error, Result, Scalar};

/// Percentages over one dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub accuracy: f64,
    pub macro_f1: f64,
    /// `100 - accuracy`.
    pub error: f64,
}

/// Argmax of the logits, ties to the lowest class index.
pub fn predict<S: Scalar>(model: &MlpModel<S>, dataset: &Dataset<S>) -> Result<Vec<usize>> {
    let logits = model.logits(dataset.features())?;
    Ok((0..logits.rows())
        .map(|i| {
            let row = logits.row(i);
            let mut best = 0;
            for (k, &v) in row.iter().enumerate().skip(1) {
                if v > row[best] {
                    best = k;
                }
            }
            best
        })
        .collect())
}

/// Unweighted mean of per-class F1 over `0..classes`, in percent. A class
/// with no true and no predicted instances scores 0.
pub fn macro_f1(truth: &[usize], pred: &[usize], classes: usize) -> f64 {
    let mut tp = vec![0usize; classes];
    let mut fp = vec![0usize; classes];
    let mut fneg = vec![0usize; classes];
    for (&t, &p) in truth.iter().zip(pred) {
        if t == p {
            tp[t] += 1;
        } else {
            fp[p] += 1;
            fneg[t] += 1;
        }
    }
    let sum: f64 = (0..classes)
        .map(|k| {
            let denom = 2 * tp[k] + fp[k] + fneg[k];
            if denom == 0 {
                0.0
            } else {
                2.0 * tp[k] as f64 / denom as f64
            }
        })
        .sum();
    100.0 * sum / classes as f64
}

/// Accuracy, macro-F1 and error of `model` on `dataset`.
pub fn evaluate<S: Scalar>(model: &MlpModel<S>, dataset: &Dataset<S>) -> Result<Evaluation> {
    if dataset.is_empty() {
        return Err(Error::Input("cannot evaluate on an empty dataset".into()));
    }
    let pred = predict(model, dataset)?;
    let truth = dataset.labels();
    let correct = truth.iter().zip(&pred).filter(|(t, p)| t == p).count();
    let accuracy = 100.0 * correct as f64 / truth.len() as f64;
    let classes = model.arch().output_dim().max(dataset.class_count());
    Ok(Evaluation {
        accuracy,
        macro_f1: macro_f1(truth, &pred, classes),
        error: 100.0 - accuracy,
    })
}
