use std::ops::Range;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

use super::Tensor;

/// Layer widths `[d_in, h_1, .., h_L, c_out]`. Hidden layers use a rectifier,
/// the output layer is linear. The last hidden activation is the feature
/// output `z`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MlpArch {
    layer_sizes: Vec<usize>,
}

impl MlpArch {
    pub fn new(layer_sizes: Vec<usize>) -> Result<Self> {
        if layer_sizes.len() < 3 {
            return Err(Error::Input(format!(
                "architecture needs input, at least one hidden and an output layer, got {layer_sizes:?}"
            )));
        }
        if layer_sizes.contains(&0) {
            return Err(Error::Input(format!(
                "layer sizes must be >= 1, got {layer_sizes:?}"
            )));
        }
        Ok(Self { layer_sizes })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn feature_dim(&self) -> usize {
        self.layer_sizes[self.layer_sizes.len() - 2]
    }

    pub fn output_dim(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    /// Number of affine layers.
    pub fn depth(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    pub fn param_count(&self) -> usize {
        self.layer_sizes
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum()
    }

    /// Ranges of each weight matrix and each bias vector inside the flat
    /// parameter vector, in canonical order: `W_1, b_1, W_2, b_2, ..`.
    pub fn segments(&self) -> Vec<Range<usize>> {
        let mut out = Vec::with_capacity(2 * self.depth());
        let mut off = 0;
        for w in self.layer_sizes.windows(2) {
            let nw = w[0] * w[1];
            out.push(off..off + nw);
            off += nw;
            out.push(off..off + w[1]);
            off += w[1];
        }
        out
    }
}

/// Flat parameter vector in canonical layer order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamVector<S> {
    values: Vec<S>,
}

impl<S: Scalar> ParamVector<S> {
    pub fn new(values: Vec<S>) -> Self {
        Self { values }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            values: vec![S::zero(); len],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn as_slice(&self) -> &[S] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [S] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<S> {
        self.values
    }

    pub fn l2_distance(&self, other: &Self) -> Result<S> {
        if self.len() != other.len() {
            return Err(Error::dim("l2_distance", self.len(), other.len()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| (a - b) * (a - b))
            .sum::<S>()
            .sqrt())
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq)]
struct DenseLayer<S> {
    fan_in: usize,
    fan_out: usize,
    /// `fan_out x fan_in`, row-major.
    weights: Vec<S>,
    bias: Vec<S>,
}

impl<S: Scalar> DenseLayer<S> {
    /// `out[i][o] = b[o] + sum_k W[o][k] * input[i][k]`
    fn affine(&self, input: &[S], n: usize) -> Vec<S> {
        let mut out = Vec::with_capacity(n * self.fan_out);
        for i in 0..n {
            let x = &input[i * self.fan_in..(i + 1) * self.fan_in];
            for o in 0..self.fan_out {
                let w = &self.weights[o * self.fan_in..(o + 1) * self.fan_in];
                let mut acc = self.bias[o];
                for (&wk, &xk) in w.iter().zip(x) {
                    acc = acc + wk * xk;
                }
                out.push(acc);
            }
        }
        out
    }
}

/// Upstream gradient fed into [`MlpModel::backprop`]: either on the logits
/// or on the penultimate features.
#[derive(Debug, Clone, Copy)]
pub enum Upstream<'a, S> {
    Logits(&'a Tensor<S>),
    Features(&'a Tensor<S>),
}

/// Activations cached by a forward pass. `acts[0]` is the input batch,
/// `acts[l]` the post-rectifier output of hidden layer `l`, and the last
/// entry holds the logits.
#[derive(Debug, Clone)]
pub struct ForwardTrace<S> {
    n: usize,
    acts: Vec<Vec<S>>,
    widths: Vec<usize>,
}

impl<S: Scalar> ForwardTrace<S> {
    pub fn features(&self) -> Tensor<S> {
        let l = self.acts.len() - 2;
        Tensor::from_parts(vec![self.n, self.widths[l]], self.acts[l].clone())
    }

    pub fn logits(&self) -> Tensor<S> {
        let l = self.acts.len() - 1;
        Tensor::from_parts(vec![self.n, self.widths[l]], self.acts[l].clone())
    }

    pub fn batch_size(&self) -> usize {
        self.n
    }
}

/// Fully connected rectifier network.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel<S> {
    arch: MlpArch,
    layers: Vec<DenseLayer<S>>,
}

impl<S: Scalar> MlpModel<S> {
    /// All weights and biases zero.
    pub fn zeros(arch: &MlpArch) -> Self {
        Self::from_params(arch, &ParamVector::zeros(arch.param_count())).expect("length from arch")
    }

    /// Weights drawn i.i.d. from `N(0, weight_std^2)`, biases zero.
    pub fn gaussian<R: Rng + ?Sized>(arch: &MlpArch, weight_std: f64, rng: &mut R) -> Self {
        let mut values = Vec::with_capacity(arch.param_count());
        for w in arch.layer_sizes.windows(2) {
            for _ in 0..w[0] * w[1] {
                let z: f64 = rng.sample(StandardNormal);
                values.push(S::lit(z * weight_std));
            }
            values.extend(std::iter::repeat_n(S::zero(), w[1]));
        }
        Self::from_params(arch, &ParamVector::new(values)).expect("length from arch")
    }

    /// He-scaled initialisation (`std = sqrt(2 / fan_in)` per layer), biases zero.
    pub fn he<R: Rng + ?Sized>(arch: &MlpArch, rng: &mut R) -> Self {
        let mut values = Vec::with_capacity(arch.param_count());
        for w in arch.layer_sizes.windows(2) {
            let std = (2.0 / w[0] as f64).sqrt();
            for _ in 0..w[0] * w[1] {
                let z: f64 = rng.sample(StandardNormal);
                values.push(S::lit(z * std));
            }
            values.extend(std::iter::repeat_n(S::zero(), w[1]));
        }
        Self::from_params(arch, &ParamVector::new(values)).expect("length from arch")
    }

    /// Rebuilds a model from a flat parameter vector.
    pub fn from_params(arch: &MlpArch, params: &ParamVector<S>) -> Result<Self> {
        if params.len() != arch.param_count() {
            return Err(Error::dim(
                "parameter vector",
                arch.param_count(),
                params.len(),
            ));
        }
        let v = params.as_slice();
        let mut off = 0;
        let layers = arch
            .layer_sizes
            .windows(2)
            .map(|w| {
                let (fan_in, fan_out) = (w[0], w[1]);
                let weights = v[off..off + fan_in * fan_out].to_vec();
                off += fan_in * fan_out;
                let bias = v[off..off + fan_out].to_vec();
                off += fan_out;
                DenseLayer {
                    fan_in,
                    fan_out,
                    weights,
                    bias,
                }
            })
            .collect();
        Ok(Self {
            arch: arch.clone(),
            layers,
        })
    }

    pub fn arch(&self) -> &MlpArch {
        &self.arch
    }

    pub fn flatten(&self) -> ParamVector<S> {
        let mut values = Vec::with_capacity(self.arch.param_count());
        for l in &self.layers {
            values.extend_from_slice(&l.weights);
            values.extend_from_slice(&l.bias);
        }
        ParamVector::new(values)
    }

    fn check_batch(&self, batch: &Tensor<S>) -> Result<()> {
        if batch.shape().len() != 2 || batch.cols() != self.arch.input_dim() {
            return Err(Error::dim(
                "forward batch",
                format!("[n, {}]", self.arch.input_dim()),
                format!("{:?}", batch.shape()),
            ));
        }
        Ok(())
    }

    pub fn forward_trace(&self, batch: &Tensor<S>) -> Result<ForwardTrace<S>> {
        self.check_batch(batch)?;
        let n = batch.rows();
        let mut acts = Vec::with_capacity(self.layers.len() + 1);
        let mut widths = Vec::with_capacity(self.layers.len() + 1);
        acts.push(batch.values().to_vec());
        widths.push(batch.cols());
        let last = self.layers.len() - 1;
        for (l, layer) in self.layers.iter().enumerate() {
            let mut out = layer.affine(&acts[l], n);
            if l < last {
                for v in &mut out {
                    *v = v.max(S::zero());
                }
            }
            acts.push(out);
            widths.push(layer.fan_out);
        }
        Ok(ForwardTrace { n, acts, widths })
    }

    /// Penultimate features and logits for every row of `batch`.
    pub fn forward(&self, batch: &Tensor<S>) -> Result<(Tensor<S>, Tensor<S>)> {
        let trace = self.forward_trace(batch)?;
        Ok((trace.features(), trace.logits()))
    }

    pub fn logits(&self, batch: &Tensor<S>) -> Result<Tensor<S>> {
        Ok(self.forward_trace(batch)?.logits())
    }

    /// Exact gradient, with respect to every parameter, of the scalar whose
    /// upstream gradient is supplied.
    pub fn backprop(&self, batch: &Tensor<S>, upstream: Upstream<'_, S>) -> Result<ParamVector<S>> {
        let trace = self.forward_trace(batch)?;
        self.backprop_trace(&trace, upstream)
    }

    /// Like [`backprop`](Self::backprop) but reuses a trace from
    /// [`forward_trace`](Self::forward_trace) on the same parameters.
    pub fn backprop_trace(
        &self,
        trace: &ForwardTrace<S>,
        upstream: Upstream<'_, S>,
    ) -> Result<ParamVector<S>> {
        let n = trace.n;
        let depth = self.layers.len();
        // Index of the first layer that receives a gradient, counting from the top.
        let (start, grad) = match upstream {
            Upstream::Logits(g) => {
                let want = [n, self.arch.output_dim()];
                if g.shape() != want {
                    return Err(Error::dim(
                        "logit gradient",
                        format!("{want:?}"),
                        format!("{:?}", g.shape()),
                    ));
                }
                (depth - 1, g.values().to_vec())
            }
            Upstream::Features(g) => {
                let want = [n, self.arch.feature_dim()];
                if g.shape() != want {
                    return Err(Error::dim(
                        "feature gradient",
                        format!("{want:?}"),
                        format!("{:?}", g.shape()),
                    ));
                }
                // d/d(pre-activation) of the last hidden layer
                let z = &trace.acts[depth - 1];
                let g = g
                    .values()
                    .iter()
                    .zip(z)
                    .map(|(&g, &a)| if a > S::zero() { g } else { S::zero() })
                    .collect();
                (depth - 2, g)
            }
        };

        let mut grads: Vec<(Vec<S>, Vec<S>)> = self
            .layers
            .iter()
            .map(|l| {
                (
                    vec![S::zero(); l.weights.len()],
                    vec![S::zero(); l.bias.len()],
                )
            })
            .collect();

        // `delta` is the gradient w.r.t. the pre-activation of layer `l`.
        let mut delta = grad;
        for l in (0..=start).rev() {
            let layer = &self.layers[l];
            let input = &trace.acts[l];
            let (gw, gb) = &mut grads[l];
            for i in 0..n {
                let d = &delta[i * layer.fan_out..(i + 1) * layer.fan_out];
                let x = &input[i * layer.fan_in..(i + 1) * layer.fan_in];
                for (o, &dv) in d.iter().enumerate() {
                    gb[o] = gb[o] + dv;
                    let row = &mut gw[o * layer.fan_in..(o + 1) * layer.fan_in];
                    for (w, &xk) in row.iter_mut().zip(x) {
                        *w = *w + dv * xk;
                    }
                }
            }
            if l == 0 {
                break;
            }
            let mut prev = vec![S::zero(); n * layer.fan_in];
            for i in 0..n {
                let d = &delta[i * layer.fan_out..(i + 1) * layer.fan_out];
                let p = &mut prev[i * layer.fan_in..(i + 1) * layer.fan_in];
                for (o, &dv) in d.iter().enumerate() {
                    let w = &layer.weights[o * layer.fan_in..(o + 1) * layer.fan_in];
                    for (pk, &wk) in p.iter_mut().zip(w) {
                        *pk = *pk + dv * wk;
                    }
                }
            }
            // through the rectifier of layer l-1
            for (p, &a) in prev.iter_mut().zip(input) {
                if a <= S::zero() {
                    *p = S::zero();
                }
            }
            delta = prev;
        }

        let mut flat = Vec::with_capacity(self.arch.param_count());
        for (gw, gb) in grads {
            flat.extend(gw);
            flat.extend(gb);
        }
        Ok(ParamVector::new(flat))
    }
}
