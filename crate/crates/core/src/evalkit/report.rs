use serde::{Deserialize, Serialize};

use crate::dataforge::Dataset;
use crate::fedsim::{ModelSnapshot, Role};
use crate::{Error, Result, Scalar};

use super::evaluate;

/// Everything reported for one method; all rates in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    /// On the test split.
    pub accuracy: f64,
    /// Macro-F1 on the test split.
    pub macro_f1: f64,
    pub error_t: f64,
    /// On the union of the non-target clients' data.
    pub error_r: f64,
    /// On the target client's data.
    pub error_f: f64,
    pub runtime_s: f64,
    /// `error_f - error_f(Retrained)`.
    pub deviation_f: f64,
}

/// Signed forget-error offset from the gold standard; positive means the
/// method forgets more than retraining does.
pub fn deviation(error_f: f64, gold_error_f: f64) -> f64 {
    error_f - gold_error_f
}

/// A named model entering [`full_report`].
#[derive(Debug, Clone)]
pub struct MethodModel<'a, S> {
    pub method: String,
    pub snapshot: &'a ModelSnapshot<S>,
    pub runtime_s: f64,
}

/// One report per method, in input order. The first `Retrained` snapshot is
/// the gold standard for `deviation_f`.
pub fn full_report<S: Scalar>(
    models: &[MethodModel<'_, S>],
    test: &Dataset<S>,
    retain: &Dataset<S>,
    forget: &Dataset<S>,
) -> Result<Vec<(String, MetricsReport)>> {
    let gold = models
        .iter()
        .find(|m| m.snapshot.role() == Role::Retrained)
        .ok_or_else(|| {
            Error::Config("report needs a Retrained snapshot as gold standard".into())
        })?;
    let gold_f = evaluate(&gold.snapshot.model(), forget)?.error;
    models
        .iter()
        .map(|m| {
            let model = m.snapshot.model();
            let t = evaluate(&model, test)?;
            let r = evaluate(&model, retain)?;
            let f = evaluate(&model, forget)?;
            Ok((
                m.method.clone(),
                MetricsReport {
                    accuracy: t.accuracy,
                    macro_f1: t.macro_f1,
                    error_t: t.error,
                    error_r: r.error,
                    error_f: f.error,
                    runtime_s: m.runtime_s,
                    deviation_f: deviation(f.error, gold_f),
                },
            ))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataforge::gen_blobs;
    use crate::numcore::{MlpArch, MlpModel};
    use crate::rng::{stream, Stream};

    #[test]
    fn gold_standard_has_zero_deviation() {
        let a = MlpArch::new(vec![3, 4, 2]).unwrap();
        let d = gen_blobs::<f64>(1, 60, 3, 2, 2.0).unwrap();
        let p1 = MlpModel::<f64>::he(&a, &mut stream(1, Stream::ModelInit, 0)).flatten();
        let p2 = MlpModel::<f64>::he(&a, &mut stream(2, Stream::ModelInit, 0)).flatten();
        let gold = ModelSnapshot::new(Role::Retrained, a.clone(), p1, 0).unwrap();
        let other = ModelSnapshot::new(Role::Trained, a, p2, 0).unwrap();
        let models = [
            MethodModel {
                method: "retrain".into(),
                snapshot: &gold,
                runtime_s: 0.0,
            },
            MethodModel {
                method: "origin".into(),
                snapshot: &other,
                runtime_s: 0.0,
            },
        ];
        let rep = full_report(&models, &d, &d, &d.subset(&[0, 1, 2, 3, 4])).unwrap();
        assert_eq!(rep[0].1.deviation_f, 0.0);
        for (_, r) in &rep {
            assert!((r.accuracy + r.error_t - 100.0).abs() < 1e-9);
        }
        // swapping method and gold negates the deviation
        let swapped = [
            MethodModel {
                method: "origin".into(),
                snapshot: &gold.relabel(Role::Trained).unwrap(),
                runtime_s: 0.0,
            },
            MethodModel {
                method: "retrain".into(),
                snapshot: &other.relabel(Role::Retrained).unwrap(),
                runtime_s: 0.0,
            },
        ];
        let rep2 = full_report(&swapped, &d, &d, &d.subset(&[0, 1, 2, 3, 4])).unwrap();
        assert_eq!(rep2[0].1.deviation_f, -rep[1].1.deviation_f);
    }

    #[test]
    fn missing_gold_is_config_error() {
        let a = MlpArch::new(vec![3, 4, 2]).unwrap();
        let d = gen_blobs::<f64>(1, 20, 3, 2, 2.0).unwrap();
        let s = ModelSnapshot::new(
            Role::Trained,
            a.clone(),
            MlpModel::<f64>::zeros(&a).flatten(),
            0,
        )
        .unwrap();
        let models = [MethodModel {
            method: "origin".into(),
            snapshot: &s,
            runtime_s: 0.0,
        }];
        assert!(matches!(
            full_report(&models, &d, &d, &d),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn deviation_signs() {
        assert!((deviation(12.4, 12.28) - 0.12).abs() < 1e-9);
        assert!((deviation(9.79, 12.28) + 2.49).abs() < 1e-9);
        assert_eq!(deviation(7.0, 7.0), 0.0);
    }
}
