//! Metrics: accuracy, macro-F1, error rates, deviation from the retrained
//! gold standard and wall-clock runtime.

mod clock;
mod metrics;
mod report;

pub use clock::{format_seconds, timed, Stopwatch};
pub use metrics::{evaluate, macro_f1, predict, Evaluation};
pub use report::{deviation, full_report, MethodModel, MetricsReport};
