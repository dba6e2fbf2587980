use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::DiscreteModel;

/// Which basis state to build.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StateLabel {
    /// The discrete level |1⟩.
    Discrete,
    /// A position state |x⟩ of the field.
    Position(f64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
    pub label: String,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        let label = label.into();
        if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(Error::NonFinite(format!("state '{label}'")));
        }
        Ok(StateVector { amplitudes, label })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// ⟨self|other⟩, conjugate-linear in self.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }
}

/// Builds |1⟩ or |x⟩ = Σ_n √(2/L)cos(ω_n x)|ω_n⟩ on the discrete model.
///
/// With this normalization the discrete sums over modes reproduce the
/// continuum amplitudes with ⟨ω|x⟩ = cos(ωx)/√π directly: the per-mode
/// factors √(2π/L) of the coupling and of the overlap cancel against the
/// mode density L/2π.
pub fn make_state(label: StateLabel, dm: &DiscreteModel) -> Result<StateVector> {
    let dim = dm.dim();
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    match label {
        StateLabel::Discrete => {
            amps[0] = Complex64::new(1.0, 0.0);
            StateVector::new(amps, "1")
        }
        StateLabel::Position(x) => {
            dm.check_in_box(x)?;
            let c = (2.0 / dm.box_length).sqrt();
            for (a, w) in amps[1..].iter_mut().zip(&dm.omega) {
                *a = Complex64::new(c * (w * x).cos(), 0.0);
            }
            StateVector::new(amps, format!("x={x}"))
        }
    }
}

/// Propagation method that produced a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Exact,
    Cn4,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AmplitudeSeries {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    pub bra: String,
    pub ket: String,
    pub method: Method,
}

/// ⟨bra|ψ(t_k)⟩ for each state of a trajectory.
pub fn amplitude(bra: &StateVector, trajectory: &[StateVector], times: &[f64], method: Method) -> Result<AmplitudeSeries> {
    if trajectory.len() != times.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            found: trajectory.len(),
        });
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidArgument("sample times must be sorted".into()));
    }
    let values = trajectory.iter().map(|s| bra.inner(s)).collect::<Result<Vec<_>>>()?;
    Ok(AmplitudeSeries {
        grid: times.to_vec(),
        values,
        bra: bra.label.clone(),
        ket: trajectory.first().map(|s| s.label.clone()).unwrap_or_default(),
        method,
    })
}
