use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::{form_factor_sq, ModelParams};
use crate::quadrature::{integrate, integrate_real, QuadConfig};

/// Riemann sheet of η.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sheet {
    /// Physical sheet, analytic off [0, ∞).
    First,
    /// Continuation from the upper half plane through the cut into Im w < 0.
    Second,
}

/// Boundary value on the real axis: η⁺ from above, η⁻ from below.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Plus,
    Minus,
}

impl Boundary {
    pub fn sign(self) -> f64 {
        match self {
            Boundary::Plus => 1.0,
            Boundary::Minus => -1.0,
        }
    }
}

/// η(w) = w − ω₁ − λ²∫₀^Ω v(ω′)²/(w − ω′) dω′ with the continuum truncated at Ω.
#[derive(Clone, Debug)]
pub struct LevelShift {
    pub params: ModelParams,
    pub omega_max: f64,
    pub quad: QuadConfig,
}

impl LevelShift {
    /// Ω = 12·M and absolute quadrature tolerance 1e-13.
    pub fn new(params: ModelParams) -> Self {
        LevelShift {
            omega_max: 12.0 * params.cutoff_m,
            params,
            quad: QuadConfig::default(),
        }
    }

    pub fn with_omega_max(mut self, omega_max: f64) -> Self {
        self.omega_max = omega_max;
        self
    }

    pub fn with_tolerance(mut self, abs_tol: f64) -> Self {
        self.quad.abs_tol = abs_tol;
        self.quad.rel_tol = abs_tol;
        self
    }

    fn lam2(&self) -> f64 {
        self.params.lambda * self.params.lambda
    }

    fn breakpoints(&self, w: Complex64) -> Vec<f64> {
        let s = w.im.abs().max(1e-3);
        [w.re - 5.0 * s, w.re - s, w.re, w.re + s, w.re + 5.0 * s]
            .into_iter()
            .filter(|&p| p > 0.0 && p < self.omega_max)
            .collect()
    }

    /// λ²∫₀^Ω v(ω′)²/(w − ω′)^power dω′ (power 1 or 2) for w off the integration range.
    ///
    /// Near the axis the leading Taylor terms of v² around w are subtracted
    /// and integrated in closed form, so the quadrature only sees a smooth
    /// remainder instead of a peak of height 1/|Im w|^power.
    fn cauchy_moment(&self, w: Complex64, power: i32) -> Result<Complex64> {
        if self.lam2() == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let p = self.params;
        let om = self.omega_max;
        let near_axis = w.im.abs() < 1.0 && w.re > -1.0 && w.re < om + 1.0;
        let value = if near_axis {
            let f0 = form_factor_sq(w, &p)?;
            let f1 = p.v2_derivative(w);
            // ∫₀^Ω dω′/(w − ω′) and ∫₀^Ω dω′/(w − ω′)²
            let log_term = w.ln() - (w - om).ln();
            let inv_term = 1.0 / (w - om) - 1.0 / w;
            let bp = self.breakpoints(w);
            match power {
                1 => {
                    let r = integrate(|x| (p.v2(x) - f0) / (w - x), 0.0, om, &bp, &self.quad)?;
                    r.value + f0 * log_term
                }
                _ => {
                    let r = integrate(
                        |x| (p.v2(x) - f0 - f1 * (x - w)) / ((w - x) * (w - x)),
                        0.0,
                        om,
                        &bp,
                        &self.quad,
                    )?;
                    // ∫(ω′ − w)/(w − ω′)² = −∫1/(w − ω′)
                    r.value + f0 * inv_term - f1 * log_term
                }
            }
        } else {
            integrate(|x| p.v2(x) / (w - x).powi(power), 0.0, om, &self.breakpoints(w), &self.quad)?.value
        };
        Ok(value * self.lam2())
    }

    fn check_first_sheet(&self, w: Complex64) -> Result<()> {
        if !(w.re.is_finite() && w.im.is_finite()) {
            return Err(Error::NonFinite("eta argument".into()));
        }
        if w.im == 0.0 && w.re >= 0.0 {
            return Err(Error::Domain(format!(
                "w = {w} lies on the cut; use eta_boundary for real-axis values"
            )));
        }
        Ok(())
    }

    fn check_second_sheet(&self, w: Complex64) -> Result<()> {
        if !(w.re.is_finite() && w.im.is_finite()) {
            return Err(Error::NonFinite("eta argument".into()));
        }
        if !(w.im < 0.0) {
            return Err(Error::Domain(format!("second sheet needs Im w < 0, got {w}")));
        }
        if w.im.abs() >= self.params.cutoff_m {
            return Err(Error::Domain(format!(
                "|Im w| = {} exceeds the continuation window M = {}",
                w.im.abs(),
                self.params.cutoff_m
            )));
        }
        if !(w.re > 0.0 && w.re < self.omega_max) {
            return Err(Error::Domain(format!(
                "Re w = {} must lie inside the continuum (0, {})",
                w.re, self.omega_max
            )));
        }
        Ok(())
    }

    pub fn eta(&self, w: Complex64, sheet: Sheet) -> Result<Complex64> {
        match sheet {
            Sheet::First => {
                self.check_first_sheet(w)?;
                Ok(w - self.params.omega1 - self.cauchy_moment(w, 1)?)
            }
            Sheet::Second => {
                self.check_second_sheet(w)?;
                let jump = Complex64::new(0.0, 2.0 * PI * self.lam2()) * form_factor_sq(w, &self.params)?;
                Ok(w - self.params.omega1 - self.cauchy_moment(w, 1)? + jump)
            }
        }
    }

    /// dη/dw from the differentiated integral (plus the derivative of the
    /// sheet jump on the second sheet).
    pub fn eta_derivative(&self, w: Complex64, sheet: Sheet) -> Result<Complex64> {
        match sheet {
            Sheet::First => {
                self.check_first_sheet(w)?;
                Ok(1.0 + self.cauchy_moment(w, 2)?)
            }
            Sheet::Second => {
                self.check_second_sheet(w)?;
                let jump = Complex64::new(0.0, 2.0 * PI * self.lam2()) * self.params.v2_derivative(w);
                Ok(1.0 + self.cauchy_moment(w, 2)? + jump)
            }
        }
    }

    /// PV∫₀^Ω λ²v(ω′)²/(ω − ω′) dω′ for 0 < ω < Ω, by singularity subtraction.
    pub fn principal_value(&self, omega: f64) -> Result<f64> {
        if !(omega > 0.0 && omega < self.omega_max) {
            return Err(Error::Domain(format!(
                "principal value needs 0 < w < {}, got {omega}",
                self.omega_max
            )));
        }
        if self.lam2() == 0.0 {
            return Ok(0.0);
        }
        let p = self.params;
        let pv = principal_value_integral(|x| p.v2(x), omega, self.omega_max, &self.quad)?;
        Ok(self.lam2() * pv)
    }

    /// η±(ω) = ω − ω₁ − PV∫ ± iπλ²v(ω)².
    pub fn eta_boundary(&self, omega: f64, side: Boundary) -> Result<Complex64> {
        let pv = self.principal_value(omega)?;
        let im = side.sign() * PI * self.lam2() * self.params.v2(omega);
        Ok(Complex64::new(omega - self.params.omega1 - pv, im))
    }

    /// Bound on the neglected part ∫_Ω^∞ λ²v²/(w − ω′)dω′, using v² ≤ 2M⁴/ω′³.
    pub fn tail_bound(&self, w: Complex64) -> f64 {
        let m4 = self.params.cutoff_m.powi(4);
        let gap = (self.omega_max - w.norm()).max(1e-300);
        self.lam2() * m4 / (self.omega_max * self.omega_max * gap)
    }
}

/// PV∫₀^upper f(ω′)/(ω − ω′) dω′ for 0 < ω < upper.
///
/// Uses ∫(f(ω′) − f(ω))/(ω − ω′)dω′ + f(ω)·ln(ω/(upper − ω)).
pub fn principal_value_integral<F>(f: F, omega: f64, upper: f64, quad: &QuadConfig) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(omega > 0.0 && omega < upper) {
        return Err(Error::Domain(format!("principal value needs 0 < w < {upper}, got {omega}")));
    }
    let f0 = f(omega);
    let smooth = integrate_real(
        |x| if x == omega { 0.0 } else { (f(x) - f0) / (omega - x) },
        0.0,
        upper,
        &[omega],
        quad,
    )?;
    Ok(smooth + f0 * (omega / (upper - omega)).ln())
}
