//! Unlearning strategies.
//!
//! The main procedure, [`iff_unlearn`], starts from the trained global model
//! and runs contrastive steps on mixup batches: each mixed feature vector is
//! pulled toward the downgraded anchor (pseudo-label 1) or the trained anchor
//! (pseudo-label 0) depending on its mixing coefficient. Every
//! `fgmp_period` steps the low-frequency spectrum of each parameter tensor
//! is restored from the trained model ([`fgmp_blend`]).
//!
//! [`mcu_unlearn`] is the same loop on raw forget samples. The baselines
//! are [`retrain_oracle`], [`finetune_baseline`] and
//! [`gradient_ascent_baseline`].

mod baselines;
mod config;
mod contrastive;
mod fgmp;
mod fusion;

pub use baselines::{finetune_baseline, gradient_ascent_baseline, retrain_oracle, AscentSettings};
pub use config::UnlearnConfig;
pub use contrastive::{downgraded_init, iff_unlearn, mcu_unlearn, DOWNGRADED_STD};
pub use fgmp::{fgmp_blend, irfft, low_bin_count, rfft};
pub use fusion::{fusion_loss, fusion_loss_batch, FeatureTriple};
