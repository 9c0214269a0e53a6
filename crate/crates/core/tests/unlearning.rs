use std::path::Path;

use fedunlearn_core::dataforge::{
    dirichlet_partition, gen_blobs, split, Dataset, PseudoLabel, SplitSpec,
};
use fedunlearn_core::evalkit::evaluate;
use fedunlearn_core::expcli::ExperimentConfig;
use fedunlearn_core::fedsim::{
    build_clients, pretrain, recover, ClientState, FederationConfig, ModelSnapshot,
};
use fedunlearn_core::numcore::{loss_ce, MlpArch, ParamVector};
use fedunlearn_core::unlearn::{
    downgraded_init, fgmp_blend, fusion_loss, gradient_ascent_baseline, iff_unlearn, mcu_unlearn,
    AscentSettings, FeatureTriple, UnlearnConfig,
};

struct Scenario {
    arch: MlpArch,
    fed: FederationConfig,
    ucfg: UnlearnConfig,
    parts: Vec<Dataset<f64>>,
    retain: Dataset<f64>,
    trained: ModelSnapshot<f64>,
    target: usize,
}

/// Pretrained federation using the hyperparameters of the shipped canonical
/// scenario on a smaller dataset.
fn scenario(seed: u64, n: usize) -> Scenario {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../docs/canonical.toml");
    let canon = ExperimentConfig::load(path).unwrap();
    let fed = FederationConfig {
        seed,
        ..canon.federation
    };
    let data = gen_blobs::<f64>(
        seed,
        n,
        canon.dataset.d,
        canon.dataset.c,
        canon.dataset.separation,
    )
    .unwrap();
    let (train, val, _) = split(&data, &SplitSpec::standard(seed)).unwrap();
    let parts = dirichlet_partition(&train, fed.num_clients, fed.dirichlet_alpha, seed).unwrap();
    let mut sizes = vec![canon.dataset.d];
    sizes.extend(&canon.model.hidden);
    sizes.push(canon.dataset.c);
    let arch = MlpArch::new(sizes).unwrap();
    let trained = pretrain(
        &fed,
        &arch,
        &mut build_clients(&parts, &fed).unwrap(),
        Some(&val),
    )
    .unwrap();
    let target = canon.target_client_id;
    let retain_parts: Vec<&Dataset<f64>> = parts
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != target)
        .map(|(_, p)| p)
        .collect();
    let retain = Dataset::concat(&retain_parts).unwrap();
    Scenario {
        arch,
        fed,
        ucfg: canon.unlearn,
        parts,
        retain,
        trained,
        target,
    }
}

fn retain_clients(s: &Scenario) -> Vec<ClientState<f64>> {
    let mut c = build_clients(&s.parts, &s.fed).unwrap();
    c.retain(|c| c.id != s.target);
    c
}

#[test]
fn gate_off_iff_is_mcu() {
    let s = scenario(1, 1200);
    let down = downgraded_init(&s.arch, 1);
    let cfg = UnlearnConfig {
        p_mixup: 0.0,
        unlearn_steps: 40,
        ..s.ucfg.clone()
    };
    let forget = &s.parts[s.target];
    let iff = iff_unlearn(&s.trained, &down, forget, &s.retain, &cfg, s.fed.adam, 9).unwrap();
    let mcu = mcu_unlearn(&s.trained, &down, forget, &cfg, s.fed.adam, 9).unwrap();
    assert_eq!(iff.params(), mcu.params());
    assert_eq!(iff.loss_trace(), mcu.loss_trace());
    assert_ne!(iff.params(), s.trained.params());
}

#[test]
fn anchors_stay_frozen_and_traces_finite() {
    let s = scenario(2, 1200);
    let down = downgraded_init(&s.arch, 2);
    let (tr0, down0) = (s.trained.clone(), down.clone());
    let out = iff_unlearn(
        &s.trained,
        &down,
        &s.parts[s.target],
        &s.retain,
        &s.ucfg,
        s.fed.adam,
        2,
    )
    .unwrap();
    assert_eq!(s.trained.params(), tr0.params());
    assert_eq!(down.params(), down0.params());
    assert_eq!(down.train_step_count(), 0);
    assert_eq!(out.loss_trace().len(), s.ucfg.unlearn_steps);
    assert!(out.loss_trace().iter().all(|l| l.is_finite()));
    assert!(out.params().all_finite());
}

#[test]
fn unlearning_raises_forget_error_and_recovery_keeps_retain_accuracy() {
    let s = scenario(3, 2500);
    let forget = &s.parts[s.target];
    let down = downgraded_init(&s.arch, 3);
    let un = iff_unlearn(&s.trained, &down, forget, &s.retain, &s.ucfg, s.fed.adam, 3).unwrap();
    let before = evaluate(&s.trained.model(), forget).unwrap().error;
    assert!(evaluate(&un.model(), forget).unwrap().error > before);

    let rec = recover(
        &un,
        &mut retain_clients(&s),
        s.target,
        &s.fed.recovery_plan(),
    )
    .unwrap();
    let acc_un = evaluate(&un.model(), &s.retain).unwrap().accuracy;
    let acc_rec = evaluate(&rec.model(), &s.retain).unwrap().accuracy;
    assert!(
        acc_rec >= acc_un - 2.0,
        "recovery dropped retain accuracy {acc_un} -> {acc_rec}"
    );
    assert_eq!(rec.loss_trace(), un.loss_trace());
}

fn forget_loss(snap: &ModelSnapshot<f64>, forget: &Dataset<f64>) -> f64 {
    loss_ce(
        &snap.model().logits(forget.features()).unwrap(),
        forget.labels(),
    )
    .unwrap()
    .0
}

#[test]
fn gradient_ascent_stays_in_ball_and_raises_forget_loss() {
    let s = scenario(4, 1200);
    let forget = &s.parts[s.target];
    for radius in [0.25, 1.0, 4.0] {
        let settings = AscentSettings {
            steps: 60,
            lr: 1e-2,
            radius,
            batch_size: 32,
            adam: s.fed.adam,
            seed: 4,
        };
        let out = gradient_ascent_baseline(&s.trained, forget, &settings).unwrap();
        let dist = out.params().l2_distance(s.trained.params()).unwrap();
        assert!(dist <= radius * (1.0 + 1e-12), "radius {radius}: {dist}");
        assert!(forget_loss(&out, forget) > forget_loss(&s.trained, forget));
        assert!(out.loss_trace().iter().all(|l| l.is_finite()));
    }
    let none = AscentSettings {
        steps: 60,
        lr: 1e-2,
        radius: 0.0,
        batch_size: 32,
        adam: s.fed.adam,
        seed: 4,
    };
    assert_eq!(
        gradient_ascent_baseline(&s.trained, forget, &none)
            .unwrap()
            .params(),
        s.trained.params()
    );
}

#[test]
fn fgmp_extremes_on_real_parameters() {
    let s = scenario(5, 600);
    let other = downgraded_init::<f64>(&s.arch, 5);
    let (un, tr) = (other.params(), s.trained.params());
    assert_eq!(&fgmp_blend(un, tr, &s.arch, 0.0).unwrap(), un);
    let full = fgmp_blend(un, tr, &s.arch, 1.0).unwrap();
    for (a, b) in full.as_slice().iter().zip(tr.as_slice()) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn fgmp_hand_dft_case() {
    // segments: W1 [0], b1 [1], W2 [2..6], b2 [6..10]
    let arch = MlpArch::new(vec![1, 1, 4]).unwrap();
    let un = ParamVector::new(vec![0.0f64, 0.0, 2.0, 0.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let tr = ParamVector::new(vec![0.0, 0.0, 3.0, 3.0, 3.0, 3.0, 0.0, 0.0, 0.0, 0.0]);
    // W2 spectra: un = [4, 0, 4], tr = [12, 0, 0]; rho = 0.3 takes bin 0
    // from tr, giving [12, 0, 4] -> [4, 2, 4, 2]
    let out = fgmp_blend(&un, &tr, &arch, 0.3).unwrap();
    let w2 = &out.as_slice()[2..6];
    for (a, b) in w2.iter().zip([4.0f64, 2.0, 4.0, 2.0]) {
        assert!((a - b).abs() < 1e-9, "{w2:?}");
    }
}

#[test]
fn closed_form_fusion_values() {
    let z = [0.3, -1.2, 2.0];
    let same = FeatureTriple {
        z_mix: &z,
        z_tr: &z,
        z_down: &z,
    };
    for label in [PseudoLabel::Erase, PseudoLabel::Retain] {
        assert!((fusion_loss(same, 0.5, label).unwrap().0 - std::f64::consts::LN_2).abs() < 1e-9);
    }
    // z_mix along z_down, orthogonal to z_tr: s_d = 2, s_t = 0 at tau 0.5
    let geom = FeatureTriple {
        z_mix: &[1.0, 0.0],
        z_tr: &[0.0, 1.0],
        z_down: &[1.0, 0.0],
    };
    let erase = fusion_loss(geom, 0.5, PseudoLabel::Erase).unwrap().0;
    let retain = fusion_loss(geom, 0.5, PseudoLabel::Retain).unwrap().0;
    assert!((erase - (1.0 + (-2.0f64).exp()).ln()).abs() < 1e-9);
    assert!((retain - (1.0 + 2.0f64.exp()).ln()).abs() < 1e-9);
}
