//! Effective functionals and parameter selections for the rate bounds.

mod constants;
mod meanvalue;
mod rates;
mod table;

pub use constants::{Constant, ConstantsLedger};
pub use meanvalue::{beta_ba, check_thm21_conditions, lhs_23, predicted_mean_value, ConditionReport, MeanValueParams, Prediction};
pub use rates::{
    rate_thm11, remark_params_thm12, section1_params_thm13, select_params_thm12, select_params_thm13, thm12_bound, thm13_bound,
    trivial_concentration, write_budget_csv, write_levelset_budget_csv, BudgetRow, Rate11, Thm12, Thm13,
};
pub use table::FunctionalTable;
