//! Segmented sieve of `f(n)` and `omega(n)`, empirical laws and direct multiplicative sums.

mod dump;
mod engine;
mod stream;
mod table;
mod twist;

pub use stream::{stream_summary, HistogramSummary, DEFAULT_BINS};
pub use table::{build_sieve, spec_hash, Discrepancy, EmpiricalCdf, SieveTable, DEFAULT_SEGMENT, EXACT_CAP};
pub use twist::{GKind, MeanValue, TwistCache};
