//! End-to-end experiments: sup-norm distances, rate fits, mean-value and level-set checks.

mod distance;
mod levelset;
mod meanvalue;
mod sweep;

pub use distance::{kolmogorov_distance, ContinuousCdf, Distribution};
pub use levelset::{levelset_consistency, levelset_sweep, verify_pik_asymptotic, LevelSetReport, LevelSetRow, LevelsetResidual, PikCheck};
pub use meanvalue::{verify_mean_value, write_meanvalue_csv, MeanValueCheck, MeanValueStatus};
pub use sweep::{build_covering, convergence_sweep, default_mode, inverted_law_for, sample_range, DistanceReport, DistanceRow, SweepConfig, SweepMode};
