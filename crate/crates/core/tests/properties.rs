use fedunlearn_core::dataforge::{dirichlet_partition, gen_blobs, PseudoLabel};
use fedunlearn_core::evalkit::evaluate;
use fedunlearn_core::fedsim::fedavg;
use fedunlearn_core::numcore::{MlpArch, MlpModel, ParamVector, Tensor};
use fedunlearn_core::unlearn::{fusion_loss, irfft, rfft, FeatureTriple};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn arch_strategy() -> impl Strategy<Value = Vec<usize>> {
    prop::collection::vec(1usize..9, 3..6)
}

/// Weighted mean computed the slow way: every coordinate summed
/// independently in the given order.
fn brute_weighted_mean(vectors: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    (0..vectors[0].len())
        .map(|j| {
            vectors
                .iter()
                .zip(weights)
                .map(|(v, w)| v[j] * w)
                .sum::<f64>()
                / total
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn flatten_round_trip(sizes in arch_strategy(), seed in any::<u64>()) {
        let arch = MlpArch::new(sizes).unwrap();
        let model = MlpModel::<f64>::gaussian(&arch, 1.0, &mut ChaCha8Rng::seed_from_u64(seed));
        let flat = model.flatten();
        prop_assert_eq!(flat.len(), arch.param_count());
        let back = MlpModel::from_params(&arch, &flat).unwrap();
        prop_assert_eq!(back.flatten(), flat);
    }

    #[test]
    fn forward_permutes_with_rows(sizes in arch_strategy(), seed in any::<u64>(), n in 2usize..8) {
        let arch = MlpArch::new(sizes).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = MlpModel::<f64>::gaussian(&arch, 1.0, &mut rng);
        let values = (0..n * arch.input_dim()).map(|_| rng.sample(StandardNormal)).collect();
        let x = Tensor::new(vec![n, arch.input_dim()], values).unwrap();
        let perm: Vec<usize> = (0..n).rev().collect();
        let (z, l) = model.forward(&x).unwrap();
        let (pz, pl) = model.forward(&x.select_rows(&perm)).unwrap();
        prop_assert_eq!(pz, z.select_rows(&perm));
        prop_assert_eq!(pl, l.select_rows(&perm));
    }

    #[test]
    fn fedavg_matches_brute_force(
        dim in 1usize..40,
        vectors in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 40), 1..8),
        raw_weights in prop::collection::vec(1usize..500, 8),
    ) {
        let vectors: Vec<Vec<f64>> = vectors.into_iter().map(|v| v[..dim].to_vec()).collect();
        let weights: Vec<f64> = raw_weights[..vectors.len()].iter().map(|&w| w as f64).collect();
        let params: Vec<ParamVector<f64>> = vectors.iter().cloned().map(ParamVector::new).collect();
        let contributions: Vec<(&ParamVector<f64>, f64)> = params.iter().zip(weights.iter().copied()).collect();
        let got = fedavg(&contributions).unwrap();
        let want = brute_weighted_mean(&vectors, &weights);
        for (g, w) in got.as_slice().iter().zip(&want) {
            prop_assert!((g - w).abs() <= 1e-12 * w.abs().max(1.0), "{} vs {}", g, w);
        }
    }

    #[test]
    fn fft_round_trip(signal in (1usize..=257).prop_flat_map(|n| prop::collection::vec(-10f64..10.0, n))) {
        let bins = rfft(&signal);
        prop_assert_eq!(bins.len(), signal.len() / 2 + 1);
        let back = irfft(&bins, signal.len()).unwrap();
        for (a, b) in back.iter().zip(&signal) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn partition_is_disjoint_and_covering(k in 2usize..8, alpha in 0.05f64..20.0, seed in any::<u64>()) {
        let data = gen_blobs::<f64>(seed % 1000, 400, 3, 4, 3.0).unwrap();
        let parts = dirichlet_partition(&data, k, alpha, seed).unwrap();
        prop_assert_eq!(parts.len(), k);
        let mut ids: Vec<usize> = parts.iter().flat_map(|p| p.ids().to_vec()).collect();
        let total = ids.len();
        ids.sort_unstable();
        ids.dedup();
        prop_assert_eq!(ids.len(), total, "a sample landed in two clients");
        let mut want = data.ids().to_vec();
        want.sort_unstable();
        prop_assert_eq!(ids, want);
    }

    #[test]
    fn evaluate_ignores_row_order(seed in any::<u64>()) {
        let data = gen_blobs::<f64>(seed, 60, 4, 3, 2.0).unwrap();
        let arch = MlpArch::new(vec![4, 6, 3]).unwrap();
        let model = MlpModel::<f64>::he(&arch, &mut ChaCha8Rng::seed_from_u64(seed));
        let perm: Vec<usize> = (0..data.len()).map(|i| (i * 7) % data.len()).collect();
        prop_assert_eq!(evaluate(&model, &data).unwrap(), evaluate(&model, &data.subset(&perm)).unwrap());
    }
}

#[test]
fn fusion_label_swap_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let bound = 2.0 * std::f64::consts::LN_2;
    for _ in 0..10_000 {
        let k = rng.random_range(2..10);
        let mut v = || -> Vec<f64> { (0..k).map(|_| rng.sample(StandardNormal)).collect() };
        let (z, t, d) = (v(), v(), v());
        let tau = rng.random_range(0.05..3.0);
        let triple = FeatureTriple {
            z_mix: &z,
            z_tr: &t,
            z_down: &d,
        };
        let erase = fusion_loss(triple, tau, PseudoLabel::Erase).unwrap().0;
        let retain = fusion_loss(triple, tau, PseudoLabel::Retain).unwrap().0;
        assert!(erase + retain >= bound - 1e-12, "{erase} + {retain}");
    }
    // equality exactly when both anchors are equally similar
    let z = [1.0, 2.0, 3.0];
    let t = [1.0, 2.0, 3.0];
    let triple = FeatureTriple {
        z_mix: &z,
        z_tr: &t,
        z_down: &t,
    };
    let sum = fusion_loss(triple, 0.5, PseudoLabel::Erase).unwrap().0
        + fusion_loss(triple, 0.5, PseudoLabel::Retain).unwrap().0;
    assert!((sum - bound).abs() < 1e-12);
}
