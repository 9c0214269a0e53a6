use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Unlearning hyperparameters. `fgmp_low_fraction` (the share of spectral
/// bins restored from the trained model) defaults to 0.3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UnlearnConfig {
    pub tau: f64,
    pub alpha_mixup: f64,
    pub p_mixup: f64,
    pub fgmp_period: usize,
    pub fgmp_low_fraction: f64,
    pub unlearn_steps: usize,
    pub unlearn_lr: f64,
    pub batch_size: usize,
    /// Radius of the parameter ball for the gradient-ascent baseline.
    pub ascent_radius: f64,
}

impl Default for UnlearnConfig {
    fn default() -> Self {
        Self {
            tau: 0.5,
            alpha_mixup: 0.2,
            p_mixup: 0.5,
            fgmp_period: 10,
            fgmp_low_fraction: 0.3,
            unlearn_steps: 100,
            unlearn_lr: 1e-5,
            batch_size: 64,
            ascent_radius: 1.0,
        }
    }
}

impl UnlearnConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(Error::Config(format!("unlearn.{field}: {msg}")));
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return bad("tau", format!("must be > 0, got {}", self.tau));
        }
        if !(self.alpha_mixup > 0.0) || !self.alpha_mixup.is_finite() {
            return bad(
                "alpha_mixup",
                format!("must be > 0, got {}", self.alpha_mixup),
            );
        }
        if !(0.0..=1.0).contains(&self.p_mixup) {
            return bad(
                "p_mixup",
                format!("must lie in [0, 1], got {}", self.p_mixup),
            );
        }
        if self.fgmp_period == 0 {
            return bad("fgmp_period", "must be >= 1".into());
        }
        if !(0.0..=1.0).contains(&self.fgmp_low_fraction) {
            return bad(
                "fgmp_low_fraction",
                format!("must lie in [0, 1], got {}", self.fgmp_low_fraction),
            );
        }
        if self.unlearn_steps == 0 {
            return bad("unlearn_steps", "must be >= 1".into());
        }
        if !(self.unlearn_lr > 0.0) || !self.unlearn_lr.is_finite() {
            return bad(
                "unlearn_lr",
                format!("must be > 0, got {}", self.unlearn_lr),
            );
        }
        if self.batch_size == 0 {
            return bad("batch_size", "must be >= 1".into());
        }
        if !(self.ascent_radius >= 0.0) || !self.ascent_radius.is_finite() {
            return bad(
                "ascent_radius",
                format!("must be >= 0, got {}", self.ascent_radius),
            );
        }
        Ok(())
    }
}
