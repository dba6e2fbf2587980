//! Level-shift function, S-matrix, resonance pole and eigenstates.

mod level_shift;
mod pole;
mod states;

pub use level_shift::{principal_value_integral, Boundary, LevelShift, Sheet};
pub use pole::{default_guess, find_pole, find_pole_with, PoleSearch, PoleSheet, ResonancePole};
pub use states::{
    field_transform, gamow_field, ls_state, s_matrix, separation_residual, separation_terms, LSState,
    SeparationCoefficients,
};
