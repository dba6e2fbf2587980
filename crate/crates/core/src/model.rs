//! Friedrichs model parameters, form factor and box discretization.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Branch of √w used by the unsquared form factor.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SqrtBranch {
    /// Principal root, cut along the negative real axis.
    #[default]
    CutOnNegativeRealAxis,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub omega1: f64,
    pub lambda: f64,
    pub cutoff_m: f64,
    pub sqrt_branch: SqrtBranch,
}

impl ModelParams {
    pub fn new(omega1: f64, lambda: f64, cutoff_m: f64) -> Result<Self> {
        if !(omega1 > 0.0 && omega1.is_finite()) {
            return Err(Error::InvalidArgument(format!("omega1 must be positive, got {omega1}")));
        }
        if !(cutoff_m > 0.0 && cutoff_m.is_finite()) {
            return Err(Error::InvalidArgument(format!("cutoff M must be positive, got {cutoff_m}")));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!("lambda must be non-negative, got {lambda}")));
        }
        if lambda >= 0.5 {
            return Err(Error::CouplingOutOfRegime(lambda));
        }
        Ok(ModelParams {
            omega1,
            lambda,
            cutoff_m,
            sqrt_branch: SqrtBranch::CutOnNegativeRealAxis,
        })
    }

    /// ω₁ = 2, λ = 0.1, M = 5.
    pub fn paper() -> Self {
        ModelParams::new(2.0, 0.1, 5.0).expect("preset parameters are valid")
    }

    pub fn with_lambda(self, lambda: f64) -> Result<Self> {
        ModelParams::new(self.omega1, lambda, self.cutoff_m)
    }

    /// v(ω)² for real ω ≥ 0.
    pub fn v2(&self, w: f64) -> f64 {
        let u = w / self.cutoff_m;
        let d = 1.0 + u * u;
        2.0 * w / (d * d)
    }

    /// v(ω) for real ω ≥ 0 (zero for negative ω, where the field has no modes).
    pub fn v(&self, w: f64) -> f64 {
        if w <= 0.0 {
            return 0.0;
        }
        let u = w / self.cutoff_m;
        (2.0 * w).sqrt() / (1.0 + u * u)
    }

    /// d(v²)/dω evaluated at complex w.
    pub fn v2_derivative(&self, w: Complex64) -> Complex64 {
        let u = (w / self.cutoff_m).powi(2);
        let d = 1.0 + u;
        2.0 * (1.0 - 3.0 * u) / (d * d * d)
    }
}

fn check_form_factor_arg(w: Complex64, p: &ModelParams) -> Result<Complex64> {
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::NonFinite("form factor argument".into()));
    }
    let d = 1.0 + (w / p.cutoff_m).powi(2);
    if d.norm() <= 1e-14 {
        return Err(Error::FormFactorPole(w));
    }
    Ok(d)
}

/// v(w) = √2·√w/(1 + (w/M)²) with the principal square root.
pub fn form_factor(w: Complex64, p: &ModelParams) -> Result<Complex64> {
    if w.im == 0.0 && w.re < 0.0 {
        return Err(Error::Domain(format!("w = {w} lies on the branch cut of sqrt")));
    }
    let d = check_form_factor_arg(w, p)?;
    Ok((2.0 * w).sqrt() / d)
}

/// v(w)² = 2w/(1 + (w/M)²)², single valued.
pub fn form_factor_sq(w: Complex64, p: &ModelParams) -> Result<Complex64> {
    let d = check_form_factor_arg(w, p)?;
    Ok(2.0 * w / (d * d))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteModel {
    pub params: ModelParams,
    pub box_length: f64,
    pub n_modes: usize,
    pub omega: Vec<f64>,
    pub coupling: Vec<f64>,
}

/// Mode energy and coupling of mode `n` (1-based) in a box of length `l`.
pub fn mode(params: &ModelParams, box_length: f64, n: usize) -> (f64, f64) {
    let w = 2.0 * PI * n as f64 / box_length;
    let u = w / params.cutoff_m;
    let v = 2.0 * (PI / box_length).sqrt() * w.sqrt() / (u * u + 1.0);
    (w, v)
}

pub fn discretize(params: ModelParams, box_length: f64, n_modes: usize) -> Result<DiscreteModel> {
    if !(box_length > 0.0 && box_length.is_finite()) {
        return Err(Error::InvalidArgument(format!("box length must be positive, got {box_length}")));
    }
    if n_modes == 0 {
        return Err(Error::InvalidArgument("n_modes must be at least 1".into()));
    }
    let omega_max = 2.0 * PI * n_modes as f64 / box_length;
    if omega_max < 10.0 * params.cutoff_m {
        log::warn!(
            "highest mode {omega_max:.3} is below 10 M = {:.3}; the cutoff is under-resolved",
            10.0 * params.cutoff_m
        );
    }
    let (omega, coupling) = (1..=n_modes).map(|n| mode(&params, box_length, n)).unzip();
    Ok(DiscreteModel {
        params,
        box_length,
        n_modes,
        omega,
        coupling,
    })
}

impl DiscreteModel {
    /// L = 100 with 1200 modes with the default parameters.
    pub fn paper() -> Self {
        discretize(ModelParams::paper(), 100.0, 1200).expect("preset discretization is valid")
    }

    pub fn dim(&self) -> usize {
        self.n_modes + 1
    }

    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    pub fn half_width(&self) -> f64 {
        0.5 * self.box_length
    }

    pub fn check_in_box(&self, x: f64) -> Result<()> {
        if !x.is_finite() || x.abs() > self.half_width() {
            return Err(Error::OutOfBox {
                x,
                half_width: self.half_width(),
            });
        }
        Ok(())
    }
}

/// ⟨ω_n|x⟩ = √(2/L)·cos(ω_n x).
pub fn position_overlap(dm: &DiscreteModel, n: usize, x: f64) -> Result<f64> {
    dm.check_in_box(x)?;
    if n == 0 || n > dm.n_modes {
        return Err(Error::InvalidArgument(format!("mode index {n} outside 1..={}", dm.n_modes)));
    }
    Ok((2.0 / dm.box_length).sqrt() * (dm.omega[n - 1] * x).cos())
}

/// Real symmetric Hamiltonian of the discretized model.
///
/// The matrix is an arrowhead: index 0 is |1⟩, indices 1..=N are the field
/// modes, and the only off-diagonal entries sit in row and column 0. It is
/// stored as its diagonal plus the border.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    pub diagonal: Vec<f64>,
    /// border[n-1] = H[0][n] = H[n][0].
    pub border: Vec<f64>,
}

pub fn assemble_hamiltonian(dm: &DiscreteModel) -> HermitianMatrix {
    let mut diagonal = Vec::with_capacity(dm.dim());
    diagonal.push(dm.params.omega1);
    diagonal.extend_from_slice(&dm.omega);
    let border = dm.coupling.iter().map(|v| dm.params.lambda * v).collect();
    HermitianMatrix { diagonal, border }
}

impl HermitianMatrix {
    pub fn new(diagonal: Vec<f64>, border: Vec<f64>) -> Result<Self> {
        if diagonal.len() != border.len() + 1 {
            return Err(Error::DimensionMismatch {
                expected: border.len() + 1,
                found: diagonal.len(),
            });
        }
        if diagonal.iter().chain(&border).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("hamiltonian entries".into()));
        }
        Ok(HermitianMatrix { diagonal, border })
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            _ if i == j => self.diagonal[i],
            (0, j) => self.border[j - 1],
            (i, 0) => self.border[i - 1],
            _ => 0.0,
        }
    }

    /// Row-major dense copy.
    pub fn to_dense(&self) -> Vec<f64> {
        let n = self.dim();
        let mut m = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = self.entry(i, j);
            }
        }
        m
    }

    pub fn trace(&self) -> f64 {
        self.diagonal.iter().sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        let d: f64 = self.diagonal.iter().map(|x| x * x).sum();
        let b: f64 = self.border.iter().map(|x| x * x).sum();
        (d + 2.0 * b).sqrt()
    }

    /// y = H·x for complex x.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y: Vec<Complex64> = self.diagonal.iter().zip(x).map(|(d, v)| v * d).collect();
        for (k, b) in self.border.iter().enumerate() {
            y[0] += x[k + 1] * b;
            y[k + 1] += x[0] * b;
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn form_factor_values() {
        let p = ModelParams::paper();
        assert_eq!(form_factor(Complex64::new(0.0, 0.0), &p).unwrap(), Complex64::new(0.0, 0.0));
        let vm = form_factor(Complex64::new(5.0, 0.0), &p).unwrap();
        assert!((vm * vm - 2.5).norm() < 1e-14);
        let v2 = form_factor_sq(Complex64::new(2.0, 0.0), &p).unwrap();
        assert!((v2.re - 4.0 / (1.16 * 1.16)).abs() < 1e-14);
        assert!((v2.re - 2.9727).abs() < 1e-4);
        assert!((p.v2(2.0) - v2.re).abs() < 1e-15);
        assert!((p.v(2.0).powi(2) - v2.re).abs() < 1e-14);
    }

    #[test]
    fn form_factor_domain_and_poles() {
        let p = ModelParams::paper();
        assert!(matches!(form_factor(Complex64::new(-1.0, 0.0), &p), Err(Error::Domain(_))));
        assert!(matches!(form_factor_sq(Complex64::new(0.0, 5.0), &p), Err(Error::FormFactorPole(_))));
        assert!(matches!(form_factor(Complex64::new(0.0, -5.0), &p), Err(Error::FormFactorPole(_))));
        // v² is single valued across the cut
        assert!(form_factor_sq(Complex64::new(-1.0, 0.0), &p).is_ok());
    }

    #[test]
    fn v2_derivative_matches_difference() {
        let p = ModelParams::paper();
        let w = Complex64::new(1.9, -0.1);
        let h = 1e-5;
        let fd = (form_factor_sq(w + h, &p).unwrap() - form_factor_sq(w - h, &p).unwrap()) / (2.0 * h);
        assert!((fd - p.v2_derivative(w)).norm() < 1e-9);
    }

    #[test]
    fn parameter_validation() {
        assert!(ModelParams::new(0.0, 0.1, 5.0).is_err());
        assert!(ModelParams::new(2.0, 0.1, -1.0).is_err());
        assert!(matches!(ModelParams::new(2.0, 0.5, 5.0), Err(Error::CouplingOutOfRegime(_))));
        assert!(ModelParams::new(2.0, 0.0, 5.0).is_ok());
        assert!(discretize(ModelParams::paper(), 0.0, 10).is_err());
        assert!(discretize(ModelParams::paper(), 100.0, 0).is_err());
    }

    #[test]
    fn discretization_grid_and_couplings() {
        let dm = discretize(ModelParams::paper(), 100.0, 1).unwrap();
        assert!((dm.omega[0] - 0.0628319).abs() < 1e-7);
        let dm = DiscreteModel::paper();
        assert_eq!(dm.dim(), 1201);
        for w in dm.omega.windows(2) {
            assert!((w[1] - w[0] - dm.spacing()).abs() < 1e-12);
        }
        // ω_n = 5 at n = 250/π is not on the grid; evaluate the formula directly
        let p = ModelParams::paper();
        let v5 = 2.0 * (PI / 100.0).sqrt() * 5f64.sqrt() / 2.0;
        assert!((v5 - 0.39633).abs() < 1e-5);
        for (k, (&w, &v)) in dm.omega.iter().zip(&dm.coupling).enumerate() {
            let expect = 2.0 * (PI / 100.0).sqrt() * w.sqrt() / ((w / p.cutoff_m).powi(2) + 1.0);
            assert!((v - expect).abs() <= 1e-15 * expect, "mode {k}");
            // V_n = √(2π/L)·v(ω_n)
            assert!((v - (2.0 * PI / 100.0).sqrt() * p.v(w)).abs() < 1e-14);
        }
    }

    #[test]
    fn hamiltonian_structure() {
        let dm = DiscreteModel::paper();
        let h = assemble_hamiltonian(&dm);
        assert_eq!(h.dim(), 1201);
        let trace = dm.params.omega1 + dm.omega.iter().sum::<f64>();
        assert!((h.trace() - trace).abs() < 1e-9);
        assert_eq!(h.entry(0, 3), 0.1 * dm.coupling[2]);
        assert_eq!(h.entry(3, 0), h.entry(0, 3));
        assert_eq!(h.entry(3, 4), 0.0);
        let dense = h.to_dense();
        let n = h.dim();
        let asym = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (dense[i * n + j] - dense[j * n + i]).abs())
            .fold(0.0, f64::max);
        assert_eq!(asym, 0.0);

        let free = assemble_hamiltonian(&discretize(ModelParams::paper().with_lambda(0.0).unwrap(), 100.0, 50).unwrap());
        assert!(free.border.iter().all(|&b| b == 0.0));
        assert_eq!(free.diagonal[0], 2.0);
    }

    #[test]
    fn position_overlaps() {
        let dm = DiscreteModel::paper();
        let c = (2.0 / 100.0f64).sqrt();
        assert!((position_overlap(&dm, 7, 0.0).unwrap() - c).abs() < 1e-15);
        // ω_25 = π/2 at x = 1
        assert!(position_overlap(&dm, 25, 1.0).unwrap().abs() < 1e-15);
        assert_eq!(position_overlap(&dm, 9, -3.3).unwrap(), position_overlap(&dm, 9, 3.3).unwrap());
        assert!(matches!(position_overlap(&dm, 1, 50.5), Err(Error::OutOfBox { .. })));
        assert!(position_overlap(&dm, 0, 1.0).is_err());
    }

    #[test]
    fn apply_matches_dense() {
        let dm = discretize(ModelParams::paper(), 20.0, 12).unwrap();
        let h = assemble_hamiltonian(&dm);
        let x: Vec<Complex64> = (0..h.dim()).map(|k| Complex64::new(k as f64 * 0.3, 1.0 - k as f64)).collect();
        let y = h.apply(&x);
        let d = h.to_dense();
        let n = h.dim();
        for i in 0..n {
            let yi: Complex64 = (0..n).map(|j| x[j] * d[i * n + j]).sum();
            assert!((yi - y[i]).norm() < 1e-12);
        }
    }
}
