use rand::Rng;

use crate::dataforge::Dataset;
use crate::numcore::{loss_ce, AdamConfig, AdamState, MlpArch, MlpModel, ParamVector, Upstream};
use crate::rng::{stream, SimRng, Stream};
use crate::{Error, Result, Scalar};

use super::FederationConfig;

/// One federation participant. Its Adam moments and mini-batch stream
/// persist across rounds.
#[derive(Debug, Clone)]
pub struct ClientState<S> {
    pub id: usize,
    pub data: Dataset<S>,
    pub lr: f64,
    adam_config: AdamConfig,
    adam: Option<AdamState<S>>,
    rng: SimRng,
}

impl<S: Scalar> ClientState<S> {
    /// The mini-batch stream is derived from `(seed, id)` only.
    pub fn new(
        id: usize,
        data: Dataset<S>,
        lr: f64,
        seed: u64,
        adam_config: AdamConfig,
    ) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Config(format!("client {id} has an empty dataset")));
        }
        Ok(Self {
            id,
            data,
            lr,
            adam_config,
            adam: None,
            rng: stream(seed, Stream::Client, id as u64),
        })
    }

    pub fn sample_count(&self) -> usize {
        self.data.len()
    }
}

/// Clients `0..K` over `parts`, all at `cfg.client_lr`.
pub fn build_clients<S: Scalar>(
    parts: &[Dataset<S>],
    cfg: &FederationConfig,
) -> Result<Vec<ClientState<S>>> {
    parts
        .iter()
        .enumerate()
        .map(|(id, d)| ClientState::new(id, d.clone(), cfg.client_lr, cfg.seed, cfg.adam))
        .collect()
}

/// `steps` Adam steps of cross-entropy from `global`, on mini-batches drawn
/// with replacement from the client's data. Returns the local parameters and
/// the client's dataset size (its FedAvg weight).
pub fn local_train<S: Scalar>(
    arch: &MlpArch,
    global: &ParamVector<S>,
    client: &mut ClientState<S>,
    steps: usize,
    batch_size: usize,
) -> Result<(ParamVector<S>, usize)> {
    if steps == 0 {
        return Err(Error::Input("local_train needs at least one step".into()));
    }
    if batch_size == 0 {
        return Err(Error::Input("batch size must be >= 1".into()));
    }
    let n = client.data.len();
    if n == 0 {
        return Err(Error::Config(format!(
            "client {} has an empty dataset",
            client.id
        )));
    }
    let mut params = global.clone();
    let adam = client
        .adam
        .get_or_insert_with(|| AdamState::new(params.len(), client.adam_config));
    let mut idx = vec![0usize; batch_size];
    for _ in 0..steps {
        for slot in idx.iter_mut() {
            *slot = client.rng.random_range(0..n);
        }
        let (x, y) = client.data.gather(&idx);
        let model = MlpModel::from_params(arch, &params)?;
        let trace = model.forward_trace(&x)?;
        let (_, dlogits) = loss_ce(&trace.logits(), &y)?;
        let grad = model.backprop_trace(&trace, Upstream::Logits(&dlogits))?;
        adam.step(&mut params, &grad, client.lr)?;
    }
    Ok((params, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataforge::gen_blobs;
    use crate::numcore::Tensor;

    fn mean_loss(arch: &MlpArch, p: &ParamVector<f64>, d: &Dataset<f64>) -> f64 {
        let m = MlpModel::from_params(arch, p).unwrap();
        loss_ce(&m.logits(d.features()).unwrap(), d.labels())
            .unwrap()
            .0
    }

    #[test]
    fn descends_on_separable_blobs() {
        let data = gen_blobs::<f64>(3, 300, 4, 2, 5.0).unwrap();
        let arch = MlpArch::new(vec![4, 8, 2]).unwrap();
        let init = MlpModel::<f64>::he(&arch, &mut stream(3, Stream::ModelInit, 0)).flatten();
        let mut c = ClientState::new(0, data.clone(), 1e-3, 3, AdamConfig::default()).unwrap();
        let before = mean_loss(&arch, &init, &data);
        let (p, n) = local_train(&arch, &init, &mut c, 200, 32).unwrap();
        assert_eq!(n, 300);
        assert!(mean_loss(&arch, &p, &data) < before);
    }

    #[test]
    fn memorises_a_single_sample() {
        let x = Tensor::from_rows(&[vec![0.3, -1.2, 0.8]]).unwrap();
        let data = Dataset::new(x, vec![2], 3).unwrap();
        let arch = MlpArch::new(vec![3, 6, 3]).unwrap();
        let init = MlpModel::<f64>::he(&arch, &mut stream(5, Stream::ModelInit, 0)).flatten();
        let mut c = ClientState::new(0, data.clone(), 1e-2, 5, AdamConfig::default()).unwrap();
        let (p, _) = local_train(&arch, &init, &mut c, 50, 4).unwrap();
        let m = MlpModel::from_params(&arch, &p).unwrap();
        let y = m.logits(data.features()).unwrap();
        let row = y.row(0);
        assert!(row[2] > row[0] && row[2] > row[1], "{row:?}");
    }

    #[test]
    fn deterministic_under_seed() {
        let data = gen_blobs::<f64>(3, 100, 4, 2, 3.0).unwrap();
        let arch = MlpArch::new(vec![4, 5, 2]).unwrap();
        let init = MlpModel::<f64>::he(&arch, &mut stream(1, Stream::ModelInit, 0)).flatten();
        let run = || {
            let mut c = ClientState::new(2, data.clone(), 1e-3, 8, AdamConfig::default()).unwrap();
            local_train(&arch, &init, &mut c, 30, 16).unwrap().0
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn empty_dataset_rejected() {
        let arch = MlpArch::new(vec![2, 2, 2]).unwrap();
        let x = Tensor::<f64>::from_rows(&[vec![0.0, 0.0]]).unwrap();
        let d = Dataset::new(x, vec![0], 2).unwrap().subset(&[]);
        assert!(matches!(
            ClientState::new(0, d, 1e-3, 0, AdamConfig::default()),
            Err(Error::Config(_))
        ));
        let _ = arch;
    }
}
