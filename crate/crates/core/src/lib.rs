//! Unstable-state decay in the Friedrichs model.
//!
//! One discrete level |1⟩ at energy ω₁ is coupled to a continuum of field
//! modes through the form factor v(ω). The crate provides
//!
//! * [`model`]: parameters, form factor, box discretization and the
//!   arrowhead Hamiltonian matrix;
//! * [`spectral`]: the level-shift function η on both sheets, the S-matrix,
//!   the resonance pole and residue, scattering states and Gamow fields;
//! * [`hardy`]: numerical Hardy-class projections of sampled functions;
//! * [`restriction`]: the T± test-function restriction operators and the
//!   restricted survival, emission and correlation amplitudes;
//! * [`evolution`]: exact spectral and fourth-order Crank–Nicolson
//!   propagation of the discretized model.
//!
//! Grid sweeps run through [`parallel::Execution`]; with the `parallel`
//! feature disabled every sweep is sequential.

// argument guards are written `!(x > 0.0)` so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evolution;
pub mod hardy;
pub mod model;
pub mod parallel;
pub mod quadrature;
pub mod restriction;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Heaviside step with the half-maximum convention Θ(0) = 1/2.
pub fn theta(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        0.0
    } else {
        0.5
    }
}
