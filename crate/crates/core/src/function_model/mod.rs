//! Additive function specifications and their multiplicative companions.

mod classify;
mod companions;
mod family;
mod spec;
mod tail;

pub use classify::{classify, Classification, LawKind, Verdict};
pub use companions::DEFAULT_TAIL_TOL;
pub use family::{DyadicThresholds, Family};
pub use spec::AdditiveFunctionSpec;
pub use tail::TailModel;
