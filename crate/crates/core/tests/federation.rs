use fedunlearn_core::dataforge::{dirichlet_partition, gen_blobs, split, Dataset, SplitSpec};
use fedunlearn_core::evalkit::evaluate;
use fedunlearn_core::fedsim::{
    build_clients, initial_params, local_train, pretrain, recover, ClientState, FederationConfig,
    ModelSnapshot, Role,
};
use fedunlearn_core::numcore::MlpArch;
use fedunlearn_core::unlearn::{finetune_baseline, retrain_oracle};
use fedunlearn_core::Error;

fn config(seed: u64) -> FederationConfig {
    FederationConfig {
        pretrain_rounds: 8,
        local_steps_per_round: 10,
        client_lr: 3e-3,
        recovery_rounds: 3,
        recovery_local_steps: 5,
        seed,
        ..Default::default()
    }
}

struct World {
    arch: MlpArch,
    parts: Vec<Dataset<f64>>,
    val: Dataset<f64>,
}

fn world(seed: u64) -> World {
    let data = gen_blobs::<f64>(seed, 1500, 6, 3, 5.0).unwrap();
    let (train, val, _) = split(&data, &SplitSpec::standard(seed)).unwrap();
    let parts = dirichlet_partition(&train, 5, 1.0, seed).unwrap();
    World {
        arch: MlpArch::new(vec![6, 16, 8, 3]).unwrap(),
        parts,
        val,
    }
}

#[test]
fn single_client_federation_is_centralised_training() {
    let w = world(1);
    let cfg = config(1);
    let data = Dataset::concat(&w.parts.iter().collect::<Vec<_>>()).unwrap();
    let client = || ClientState::new(0, data.clone(), cfg.client_lr, cfg.seed, cfg.adam).unwrap();

    let fed = pretrain(&cfg, &w.arch, &mut [client()], None).unwrap();
    let steps = cfg.pretrain_rounds * cfg.local_steps_per_round;
    let (central, _) = local_train(
        &w.arch,
        &initial_params(&w.arch, cfg.seed),
        &mut client(),
        steps,
        cfg.batch_size,
    )
    .unwrap();
    assert_eq!(fed.params(), &central);
    assert_eq!(fed.train_step_count(), steps as u64);
}

#[test]
fn parallel_rounds_are_bit_identical_and_accurate() {
    let w = world(2);
    let serial_cfg = config(2);
    let parallel_cfg = FederationConfig {
        parallel: true,
        ..serial_cfg.clone()
    };
    let serial = pretrain(
        &serial_cfg,
        &w.arch,
        &mut build_clients(&w.parts, &serial_cfg).unwrap(),
        Some(&w.val),
    )
    .unwrap();
    let mut shuffled = build_clients(&w.parts, &parallel_cfg).unwrap();
    shuffled.reverse();
    let parallel = pretrain(&parallel_cfg, &w.arch, &mut shuffled, Some(&w.val)).unwrap();
    assert_eq!(serial.params(), parallel.params());
    assert_eq!(serial.history(), parallel.history());
    assert_eq!(serial.history().len(), serial_cfg.pretrain_rounds);
    let acc = evaluate(&serial.model(), &w.val).unwrap().accuracy;
    assert!(acc > 95.0, "validation accuracy {acc}");
}

fn retain(w: &World, cfg: &FederationConfig, target: usize) -> Vec<ClientState<f64>> {
    let mut c = build_clients(&w.parts, cfg).unwrap();
    c.retain(|c| c.id != target);
    c
}

#[test]
fn target_data_is_never_read_without_target() {
    let w = world(3);
    let cfg = config(3);
    let target = 2;
    let trained = pretrain(
        &cfg,
        &w.arch,
        &mut build_clients(&w.parts, &cfg).unwrap(),
        None,
    )
    .unwrap();
    let target_data = &w.parts[target];
    let before = target_data.reads();
    assert!(before > 0, "pretraining must have read the target");

    retrain_oracle(&cfg, &w.arch, &mut retain(&w, &cfg, target), target, None).unwrap();
    assert_eq!(target_data.reads(), before);
    finetune_baseline(
        &trained,
        &mut retain(&w, &cfg, target),
        target,
        &cfg.recovery_plan(),
    )
    .unwrap();
    assert_eq!(target_data.reads(), before);
    let unlearned = trained.relabel(Role::Unlearned).unwrap();
    let rec = recover(
        &unlearned,
        &mut retain(&w, &cfg, target),
        target,
        &cfg.recovery_plan(),
    )
    .unwrap();
    assert_eq!(target_data.reads(), before);
    assert_eq!(rec.role(), Role::Unlearned);
}

#[test]
fn target_among_retain_clients_is_rejected() {
    let w = world(4);
    let cfg = config(4);
    let snap = ModelSnapshot::new(
        Role::Unlearned,
        w.arch.clone(),
        initial_params(&w.arch, 4),
        0,
    )
    .unwrap();
    let mut all = build_clients(&w.parts, &cfg).unwrap();
    assert!(matches!(
        recover(&snap, &mut all, 1, &cfg.recovery_plan()),
        Err(Error::Isolation(_))
    ));
    assert!(matches!(
        retrain_oracle(&cfg, &w.arch, &mut all, 1, None),
        Err(Error::Isolation(_))
    ));
}

#[test]
fn zero_recovery_rounds_is_a_no_op() {
    let w = world(5);
    let cfg = FederationConfig {
        recovery_rounds: 0,
        ..config(5)
    };
    let snap = ModelSnapshot::new(
        Role::Unlearned,
        w.arch.clone(),
        initial_params(&w.arch, 5),
        7,
    )
    .unwrap();
    let out = recover(&snap, &mut retain(&w, &cfg, 0), 0, &cfg.recovery_plan()).unwrap();
    assert_eq!(out.params(), snap.params());
    assert_eq!(out.train_step_count(), 7);
}
