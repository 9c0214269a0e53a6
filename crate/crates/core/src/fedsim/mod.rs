//! Federated round engine.
//!
//! A round broadcasts the global parameters, runs [`local_train`] on every
//! participating client (serially or on the rayon pool), then aggregates
//! with [`fedavg`] in ascending client-id order once all clients are back.
//! Each client owns its data, Adam moments and RNG stream, so scheduling has
//! no effect on the result.

mod client;
mod config;
mod engine;
mod fedavg;
mod snapshot;

pub use client::{build_clients, local_train, ClientState};
pub use config::{FederationConfig, RoundPlan};
pub use engine::{initial_params, pretrain, recover, run_rounds, RoundRecord};
pub use fedavg::fedavg;
pub use snapshot::{ModelSnapshot, Role};
