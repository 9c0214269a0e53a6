use serde::{Deserialize, Serialize};

use crate::numcore::AdamConfig;
use crate::{Error, Result};

/// Federation hyperparameters. Pretraining defaults (30 rounds of 20 local
/// steps) are desk-scale choices; the rest follow the reference setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FederationConfig {
    pub num_clients: usize,
    pub pretrain_rounds: usize,
    pub local_steps_per_round: usize,
    pub batch_size: usize,
    pub client_lr: f64,
    pub target_client_lr: f64,
    pub dirichlet_alpha: f64,
    pub recovery_rounds: usize,
    pub recovery_local_steps: usize,
    /// Run the clients of a round on the rayon pool.
    pub parallel: bool,
    pub adam: AdamConfig,
    /// Filled from the experiment seed.
    #[serde(skip)]
    pub seed: u64,
}

impl Default for FederationConfig {
    fn default() -> Self {
        Self {
            num_clients: 5,
            pretrain_rounds: 30,
            local_steps_per_round: 20,
            batch_size: 64,
            client_lr: 1e-4,
            target_client_lr: 1e-5,
            dirichlet_alpha: 1.0,
            recovery_rounds: 10,
            recovery_local_steps: 20,
            parallel: false,
            adam: AdamConfig::default(),
            seed: 0,
        }
    }
}

impl FederationConfig {
    pub fn validate(&self) -> Result<()> {
        let bad =
            |field: &str, msg: String| Err(Error::Config(format!("federation.{field}: {msg}")));
        if self.num_clients < 2 {
            return bad(
                "num_clients",
                format!("must be >= 2, got {}", self.num_clients),
            );
        }
        if self.batch_size == 0 {
            return bad("batch_size", "must be >= 1".into());
        }
        if self.local_steps_per_round == 0 {
            return bad("local_steps_per_round", "must be >= 1".into());
        }
        if self.recovery_local_steps == 0 {
            return bad("recovery_local_steps", "must be >= 1".into());
        }
        for (name, lr) in [
            ("client_lr", self.client_lr),
            ("target_client_lr", self.target_client_lr),
        ] {
            if !(lr > 0.0) || !lr.is_finite() {
                return bad(name, format!("must be > 0, got {lr}"));
            }
        }
        if !(self.dirichlet_alpha > 0.0) {
            return bad(
                "dirichlet_alpha",
                format!("must be > 0, got {}", self.dirichlet_alpha),
            );
        }
        let a = &self.adam;
        if !(0.0..1.0).contains(&a.beta1) || !(0.0..1.0).contains(&a.beta2) || !(a.eps > 0.0) {
            return bad(
                "adam",
                format!("need beta1, beta2 in [0, 1) and eps > 0, got {a:?}"),
            );
        }
        Ok(())
    }

    pub fn pretrain_plan(&self) -> RoundPlan {
        RoundPlan {
            rounds: self.pretrain_rounds,
            local_steps: self.local_steps_per_round,
            batch_size: self.batch_size,
            parallel: self.parallel,
        }
    }

    pub fn recovery_plan(&self) -> RoundPlan {
        RoundPlan {
            rounds: self.recovery_rounds,
            local_steps: self.recovery_local_steps,
            batch_size: self.batch_size,
            parallel: self.parallel,
        }
    }
}

/// Shape of a sequence of federated rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RoundPlan {
    pub rounds: usize,
    pub local_steps: usize,
    pub batch_size: usize,
    pub parallel: bool,
}
