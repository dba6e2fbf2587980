//! Time evolution of the discretized model.

mod arrowhead;
mod propagate;
mod state;

pub use arrowhead::{diagonalize, diagonalize_with, SpectralDecomposition};
pub use propagate::{
    cn4_step, propagate_cn4, propagate_cn4_policy, propagate_exact, propagate_exact_with, AutoDt, DtPolicy,
    ExactPropagator, Trajectory,
};
pub use state::{amplitude, make_state, AmplitudeSeries, Method, StateLabel, StateVector};
