//! Restricted complex-eigenstate amplitudes for the survival, emission and
//! correlation scenarios, and the free-field correlation.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::form_factor;
use crate::quadrature::integrate;
use crate::spectral::{field_transform, LevelShift, ResonancePole};
use crate::theta;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn cexp(z: Complex64) -> Complex64 {
    z.exp()
}

/// Θ(t)·N·e^{−izt} + Θ(−t)·N̄·e^{−iz̄t}, with Θ(0) = 1/2.
pub fn restricted_survival(pole: &ResonancePole, t: f64) -> Complex64 {
    let z = pole.z;
    let zc = pole.z_cc;
    pole.residue * cexp(-I * z * t) * theta(t) + pole.residue_cc() * cexp(-I * zc * t) * theta(-t)
}

/// Θ(t − |x|)e^{−iz(t−|x|)} + e^{−iz(t+|x|)}: outgoing front plus the
/// decaying image term.
fn front_pair(z: Complex64, t: f64, x: f64) -> Complex64 {
    let ax = x.abs();
    cexp(-I * z * (t - ax)) * theta(t - ax) + cexp(-I * z * (t + ax))
}

/// ⟨x|e^{−iHt}|1⟩ restricted to the z pole, for t > 0:
///
/// −i√π·λN·[v(z)·(Θ(t−|x|)e^{−iz(t−|x|)} + e^{−iz(t+|x|)}) − e^{−izt}J(z,x)/(iπ)],
/// with J(z, x) = ∫₀^Ω v(ω)cos(ωx)/(z − ω)dω.
pub fn restricted_emission(ls: &LevelShift, pole: &ResonancePole, t: f64, x: f64) -> Result<Complex64> {
    let j = field_transform(ls, pole.z, x)?;
    restricted_emission_with(ls, pole, t, x, j)
}

/// As [`restricted_emission`] with J(z, x) supplied by the caller.
pub fn restricted_emission_with(
    ls: &LevelShift,
    pole: &ResonancePole,
    t: f64,
    x: f64,
    j: Complex64,
) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("restricted emission needs t > 0, got {t}")));
    }
    let lam = ls.params.lambda;
    if lam == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let z = pole.z;
    let vz = form_factor(z, &ls.params)?;
    let n = pole.residue;
    let front = -I * PI.sqrt() * lam * n * vz * front_pair(z, t, x);
    let bulk = lam * n * cexp(-I * z * t) * j / PI.sqrt();
    Ok(front + bulk)
}

/// ⟨x₁|e^{−iHt}|x₂⟩ restricted to the z pole, for t > 0.
///
/// (2πi)²λ²N/π·[v(z)²P − v(z)F₁K₂ − v(z)K₁F₂ + e^{−izt}K₁K₂] where
/// F_j = ½(Θ(t−|x_j|)e^{−iz(t−|x_j|)} + e^{−iz(t+|x_j|)}), K_j = J(z,x_j)/(2πi)
/// and P collects the four leading fronts
/// ¼Σ_{s₁,s₂=±} Θ(a)e^{−iza}[1 − Θ(s₁x₁ − t) − Θ(s₂x₂ − t)], a = t − s₁x₁ − s₂x₂.
pub fn restricted_correlation(ls: &LevelShift, pole: &ResonancePole, t: f64, x1: f64, x2: f64) -> Result<Complex64> {
    let j1 = field_transform(ls, pole.z, x1)?;
    let j2 = if x2 == x1 { j1 } else { field_transform(ls, pole.z, x2)? };
    restricted_correlation_with(ls, pole, t, (x1, j1), (x2, j2))
}

/// As [`restricted_correlation`] with J(z, x_j) supplied by the caller.
pub fn restricted_correlation_with(
    ls: &LevelShift,
    pole: &ResonancePole,
    t: f64,
    (x1, j1): (f64, Complex64),
    (x2, j2): (f64, Complex64),
) -> Result<Complex64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("restricted correlation needs t > 0, got {t}")));
    }
    let lam = ls.params.lambda;
    if lam == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let z = pole.z;
    let vz = form_factor(z, &ls.params)?;
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let k1 = j1 / two_pi_i;
    let k2 = j2 / two_pi_i;
    let f1 = 0.5 * front_pair(z, t, x1);
    let f2 = 0.5 * front_pair(z, t, x2);
    let mut p = Complex64::new(0.0, 0.0);
    for s1 in [1.0, -1.0] {
        for s2 in [1.0, -1.0] {
            let a = t - s1 * x1 - s2 * x2;
            let w = theta(a) * (1.0 - theta(s1 * x1 - t) - theta(s2 * x2 - t));
            if w != 0.0 {
                p += cexp(-I * z * a) * w;
            }
        }
    }
    p *= 0.25;
    let bracket = vz * vz * p - vz * f1 * k2 - vz * k1 * f2 + cexp(-I * z * t) * k1 * k2;
    Ok(two_pi_i * two_pi_i * lam * lam * pole.residue / PI * bracket)
}

/// Free propagator ⟨x₁|e^{−iH₀t}|x₂⟩ = (1/π)∫₀^∞ cos(ωx₁)cos(ωx₂)e^{−iωt}dω.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeFieldCorrelation {
    /// Arguments t − s₁x₁ − s₂x₂ of the four δ terms, each with weight ¼,
    /// ordered (s₁, s₂) = (+,+), (+,−), (−,+), (−,−).
    pub delta_arguments: [f64; 4],
    pub delta_weight: f64,
    /// −(i/π)∫₀^Ω cos(ωx₁)cos(ωx₂)sin(ωt)dω.
    pub smooth: Complex64,
    /// Change of `smooth` when the cutoff is raised from Ω to 1.5Ω.
    pub cutoff_sensitivity: f64,
}

impl FreeFieldCorrelation {
    /// x₁ positions of the four deltas for a fixed x₂.
    pub fn delta_positions_x1(t: f64, x2: f64) -> [f64; 4] {
        [t - x2, t + x2, -(t - x2), -(t + x2)]
    }
}

pub fn free_field_correlation(ls: &LevelShift, t: f64, x1: f64, x2: f64) -> Result<FreeFieldCorrelation> {
    if !(t.is_finite() && x1.is_finite() && x2.is_finite()) {
        return Err(Error::NonFinite("free correlation arguments".into()));
    }
    let mut delta_arguments = [0.0; 4];
    let mut k = 0;
    for s1 in [1.0, -1.0] {
        for s2 in [1.0, -1.0] {
            delta_arguments[k] = t - s1 * x1 - s2 * x2;
            k += 1;
        }
    }
    let smooth_to = |upper: f64| -> Result<Complex64> {
        let freq = t.abs() + x1.abs() + x2.abs();
        let mut quad = ls.quad;
        quad.abs_tol = quad.abs_tol.max(1e-12);
        if freq > 0.0 {
            quad.max_panel = Some(PI / freq);
        }
        let r = integrate(
            |w| Complex64::new((w * x1).cos() * (w * x2).cos() * (w * t).sin(), 0.0),
            0.0,
            upper,
            &[],
            &quad,
        )?;
        Ok(-I * r.value / PI)
    };
    let smooth = smooth_to(ls.omega_max)?;
    let wider = smooth_to(1.5 * ls.omega_max)?;
    Ok(FreeFieldCorrelation {
        delta_arguments,
        delta_weight: 0.25,
        smooth,
        cutoff_sensitivity: (wider - smooth).norm(),
    })
}

/// Which restricted amplitude an evaluator produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    Survival,
    Emission,
    Correlation,
}

/// A restricted amplitude bound to its level shift and pole.
#[derive(Clone, Debug)]
pub struct RestrictedAmplitude {
    pub scenario: Scenario,
    pub level_shift: LevelShift,
    pub pole: ResonancePole,
}

impl RestrictedAmplitude {
    pub fn new(scenario: Scenario, level_shift: LevelShift, pole: ResonancePole) -> Self {
        RestrictedAmplitude {
            scenario,
            level_shift,
            pole,
        }
    }

    /// Evaluates at time `t` and the scenario's positions (none, x, or x₁ and x₂).
    pub fn evaluate(&self, t: f64, positions: &[f64]) -> Result<Complex64> {
        let expected = match self.scenario {
            Scenario::Survival => 0,
            Scenario::Emission => 1,
            Scenario::Correlation => 2,
        };
        if positions.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: positions.len(),
            });
        }
        match self.scenario {
            Scenario::Survival => Ok(restricted_survival(&self.pole, t)),
            Scenario::Emission => restricted_emission(&self.level_shift, &self.pole, t, positions[0]),
            Scenario::Correlation => {
                restricted_correlation(&self.level_shift, &self.pole, t, positions[0], positions[1])
            }
        }
    }
}
