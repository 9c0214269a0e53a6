//! Deterministic simulator for federated client unlearning.
//!
//! The crate is organised bottom-up:
//!
//! - [`numcore`]: dense tensors, a small rectifier MLP with analytic gradients,
//!   Adam, cosine similarity.
//! - [`dataforge`]: synthetic blobs, CSV ingestion, splitting, Dirichlet
//!   partitioning, Beta sampling and mixup batch construction.
//! - [`fedsim`]: client local training, FedAvg and the federated round engine.
//! - [`unlearn`]: mixup-fused contrastive unlearning, frequency-guided memory
//!   preservation and the baseline strategies.
//! - [`evalkit`]: accuracy, macro-F1, error rates and runtime accounting.
//! - [`expcli`]: experiment configuration, orchestration, sweeps and golden
//!   regression runs used by the `fedunlearn` binary.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the
//! experiment layer runs in `f64` through the aliases below.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataforge;
pub mod error;
pub mod evalkit;
pub mod expcli;
pub mod fedsim;
pub mod numcore;
pub mod rng;
mod scalar;
pub mod unlearn;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Tensor64 = numcore::Tensor<f64>;
pub type Tensor32 = numcore::Tensor<f32>;
pub type MlpModel64 = numcore::MlpModel<f64>;
pub type MlpModel32 = numcore::MlpModel<f32>;
pub type ParamVector64 = numcore::ParamVector<f64>;
pub type ParamVector32 = numcore::ParamVector<f32>;
pub type Dataset64 = dataforge::Dataset<f64>;
pub type Dataset32 = dataforge::Dataset<f32>;
pub type ModelSnapshot64 = fedsim::ModelSnapshot<f64>;
pub type ModelSnapshot32 = fedsim::ModelSnapshot<f32>;
pub type ClientState64 = fedsim::ClientState<f64>;
