//! Numeric kernel: tensors, the rectifier MLP, losses, Adam and similarity.

mod adam;
mod loss;
mod mlp;
mod similarity;
mod tensor;

pub use adam::{AdamConfig, AdamState};
pub use loss::loss_ce;
pub use mlp::{ForwardTrace, MlpArch, MlpModel, ParamVector, Upstream};
pub use similarity::{cosine_sim, cosine_sim_grad, DEGENERATE_NORM};
pub use tensor::Tensor;
