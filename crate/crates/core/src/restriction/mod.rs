//! Test-function restriction of pole contributions.

mod amplitudes;
mod tcases;

pub use amplitudes::{
    free_field_correlation, restricted_correlation, restricted_correlation_with, restricted_emission,
    restricted_emission_with, restricted_survival, FreeFieldCorrelation, RestrictedAmplitude, Scenario,
};
pub use tcases::{
    collapse_residual, default_test_function, rational_test_function, t_restrict, t_suite, Case, Expr,
    PoleChoice, Restricted, RestrictionCase, SystemFactor, TSuiteResult,
};
