use std::f64::consts::PI;

use num_complex::Complex64;

use super::level_shift::{LevelShift, Sheet};
use crate::error::{Error, Result};

/// Which continuation a pole was found on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PoleSheet {
    SecondFromAbove,
}

/// Second-sheet zero of η with its residue; `z_cc` is the mirror pole of the
/// continuation from below.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResonancePole {
    pub z: Complex64,
    pub residue: Complex64,
    pub z_cc: Complex64,
    pub sheet: PoleSheet,
    /// |η_II(z)| at the returned root.
    pub eta_residual: f64,
    pub iterations: usize,
}

impl ResonancePole {
    /// Residue attached to z^{c.c}: the complex conjugate of N.
    pub fn residue_cc(&self) -> Complex64 {
        self.residue.conj()
    }

    /// 2|Im z|.
    pub fn decay_rate(&self) -> f64 {
        2.0 * self.z.im.abs()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoleSearch {
    pub max_iterations: usize,
    /// Target |η_II(z)|.
    pub tolerance: f64,
}

impl Default for PoleSearch {
    fn default() -> Self {
        PoleSearch {
            max_iterations: 60,
            tolerance: 1e-12,
        }
    }
}

/// ω₁ − iπλ²v(ω₁)², the golden-rule estimate.
pub fn default_guess(ls: &LevelShift) -> Complex64 {
    let p = ls.params;
    Complex64::new(p.omega1, -PI * p.lambda * p.lambda * p.v2(p.omega1))
}

pub fn find_pole(ls: &LevelShift, guess: Complex64) -> Result<ResonancePole> {
    find_pole_with(ls, guess, PoleSearch::default())
}

pub fn find_pole_with(ls: &LevelShift, guess: Complex64, search: PoleSearch) -> Result<ResonancePole> {
    if ls.params.lambda == 0.0 {
        return Err(Error::InvalidArgument(
            "no resonance without coupling: the level sits on the real axis".into(),
        ));
    }
    if !(guess.im < 0.0) {
        return Err(Error::Domain(format!("pole guess must lie in the lower half plane, got {guess}")));
    }
    let f = |w: Complex64| ls.eta(w, Sheet::Second);
    let (z, iterations) = match secant(&f, guess, search) {
        Ok(r) => r,
        Err(e) => {
            log::debug!("secant failed ({e}); falling back to Muller");
            muller(&f, guess, search)?
        }
    };
    let omega1 = ls.params.omega1;
    if (z - omega1).norm() > 1.0 {
        return Err(Error::WrongBasin { z, omega1 });
    }
    let eta_residual = f(z)?.norm();
    let residue = 1.0 / ls.eta_derivative(z, Sheet::Second)?;
    Ok(ResonancePole {
        z,
        residue,
        z_cc: z.conj(),
        sheet: PoleSheet::SecondFromAbove,
        eta_residual,
        iterations,
    })
}

fn step_scale(w: Complex64) -> Complex64 {
    Complex64::new(1e-3, -1e-3) * w.im.abs().max(1e-3)
}

fn secant<F>(f: &F, guess: Complex64, search: PoleSearch) -> Result<(Complex64, usize)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let mut z0 = guess;
    let mut z1 = guess + step_scale(guess);
    let mut f0 = f(z0)?;
    let mut f1 = f(z1)?;
    for it in 0..search.max_iterations {
        if f1.norm() < search.tolerance {
            return Ok((z1, it));
        }
        let denom = f1 - f0;
        if denom.norm() == 0.0 {
            break;
        }
        let z2 = z1 - f1 * (z1 - z0) / denom;
        let f2 = f(z2)?;
        z0 = z1;
        f0 = f1;
        z1 = z2;
        f1 = f2;
        if (z1 - z0).norm() < 1e-15 * z1.norm() && f1.norm() < 1e3 * search.tolerance {
            return Ok((z1, it + 1));
        }
    }
    Err(Error::NoConvergence {
        iterations: search.max_iterations,
        residual: f1.norm(),
    })
}

fn muller<F>(f: &F, guess: Complex64, search: PoleSearch) -> Result<(Complex64, usize)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let h = step_scale(guess) * 10.0;
    let mut x = [guess - h, guess + h, guess];
    let mut y = [f(x[0])?, f(x[1])?, f(x[2])?];
    for it in 0..search.max_iterations {
        if y[2].norm() < search.tolerance {
            return Ok((x[2], it));
        }
        let h1 = x[1] - x[0];
        let h2 = x[2] - x[1];
        let d1 = (y[1] - y[0]) / h1;
        let d2 = (y[2] - y[1]) / h2;
        let a = (d2 - d1) / (h2 + h1);
        let b = a * h2 + d2;
        let disc = (b * b - 4.0 * a * y[2]).sqrt();
        let den = if (b + disc).norm() >= (b - disc).norm() { b + disc } else { b - disc };
        if den.norm() == 0.0 {
            break;
        }
        let mut xn = x[2] - 2.0 * y[2] / den;
        // keep iterates inside the continuation window
        if xn.im >= 0.0 {
            xn.im = 0.5 * x[2].im;
        }
        let yn = f(xn)?;
        x = [x[1], x[2], xn];
        y = [y[1], y[2], yn];
    }
    Err(Error::NoConvergence {
        iterations: search.max_iterations,
        residual: y[2].norm(),
    })
}
