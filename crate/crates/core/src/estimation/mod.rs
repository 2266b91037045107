//! Model fitting: the log-log killer/victim regression with full OLS
//! diagnostics, regime classification of the growth coefficient, logistic
//! curve fitting and Fisher-Pry share substitution.

mod fisher_pry;
mod killer;
mod logistic_fit;
mod ols;
mod regime;

pub use fisher_pry::{fisher_pry_fit, FisherPryFit};
pub use killer::{
    killer_fit, killer_fit_aligned, CoMovement, KillerFit, KillerFitOptions, LogPoint,
};
pub use logistic_fit::{logistic_fit, logistic_fit_with, LogisticFit, LogisticFitOptions};
pub use ols::{ols_fit, significance_stars, t_critical, RegressionFit};
pub use regime::{classify_regime, classify_slope, Regime, TolerancePolicy};
