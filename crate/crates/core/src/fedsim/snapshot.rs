use std::fmt;

use serde::{Deserialize, Serialize};

use crate::numcore::{MlpArch, MlpModel, ParamVector};
use crate::{Error, Result, Scalar};

/// What a snapshot stands for in the unlearning workflow.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Role {
    /// Global model after federated pretraining on every client.
    Trained,
    /// Never-trained erasure anchor.
    Downgraded,
    /// Output of an unlearning strategy (before or after recovery).
    Unlearned,
    /// Gold standard trained without the target client.
    Retrained,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Immutable, role-tagged parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSnapshot<S> {
    role: Role,
    arch: MlpArch,
    params: ParamVector<S>,
    train_step_count: u64,
    /// Per-round validation accuracy (percent); empty when not tracked.
    history: Vec<f64>,
    /// Per-step objective of the procedure that produced the snapshot.
    loss_trace: Vec<f64>,
}

impl<S: Scalar> ModelSnapshot<S> {
    pub fn new(
        role: Role,
        arch: MlpArch,
        params: ParamVector<S>,
        train_step_count: u64,
    ) -> Result<Self> {
        if params.len() != arch.param_count() {
            return Err(Error::dim(
                "snapshot params",
                arch.param_count(),
                params.len(),
            ));
        }
        if role == Role::Downgraded && train_step_count != 0 {
            return Err(Error::Input(format!(
                "downgraded snapshot must be untrained, got {train_step_count} steps"
            )));
        }
        Ok(Self {
            role,
            arch,
            params,
            train_step_count,
            history: Vec::new(),
            loss_trace: Vec::new(),
        })
    }

    pub fn with_history(mut self, history: Vec<f64>) -> Self {
        self.history = history;
        self
    }

    pub fn with_loss_trace(mut self, trace: Vec<f64>) -> Self {
        self.loss_trace = trace;
        self
    }

    /// Same parameters under a different role.
    pub fn relabel(&self, role: Role) -> Result<Self> {
        Ok(Self::new(
            role,
            self.arch.clone(),
            self.params.clone(),
            self.train_step_count,
        )?
        .with_history(self.history.clone())
        .with_loss_trace(self.loss_trace.clone()))
    }

    pub fn role(&self) -> Role {
        self.role
    }

    pub fn arch(&self) -> &MlpArch {
        &self.arch
    }

    pub fn params(&self) -> &ParamVector<S> {
        &self.params
    }

    pub fn train_step_count(&self) -> u64 {
        self.train_step_count
    }

    pub fn history(&self) -> &[f64] {
        &self.history
    }

    pub fn loss_trace(&self) -> &[f64] {
        &self.loss_trace
    }

    pub fn model(&self) -> MlpModel<S> {
        MlpModel::from_params(&self.arch, &self.params).expect("length checked at construction")
    }
}
