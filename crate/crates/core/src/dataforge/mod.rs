//! Datasets and samplers: synthetic blobs, CSV ingestion, train/val/test
//! splitting, Dirichlet non-IID partitioning, Beta draws and mixup batches.

mod beta;
mod blobs;
mod csvio;
mod dataset;
mod mixup;
mod partition;
mod split;

pub use beta::{sample_beta, sample_ln_gamma};
pub use blobs::gen_blobs;
pub use csvio::{load_csv, write_csv};
pub use dataset::Dataset;
pub use mixup::{build_mix_batch, MixedBatch, PseudoLabel};
pub use partition::{dirichlet_partition, largest_remainder, MAX_PARTITION_ATTEMPTS};
pub use split::{split, SplitSpec};
