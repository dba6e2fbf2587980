use std::f64::consts::PI;

use num_complex::Complex64;

use super::level_shift::{principal_value_integral, Boundary, LevelShift};
use super::pole::ResonancePole;
use crate::error::{Error, Result};
use crate::model::form_factor;
use crate::quadrature::integrate;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// S(ω) = η⁻(ω)/η⁺(ω).
pub fn s_matrix(ls: &LevelShift, omega: f64) -> Result<Complex64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("S-matrix needs w > 0, got {omega}")));
    }
    let plus = ls.eta_boundary(omega, Boundary::Plus)?;
    let minus = ls.eta_boundary(omega, Boundary::Minus)?;
    Ok(minus / plus)
}

/// Lippmann–Schwinger state |F^±_ω⟩ in the {|1⟩, |ω′⟩} basis.
///
/// ⟨ω′|F^±_ω⟩ = δ(ω − ω′)·(1 + on_shell) + PV kernel λ²v(ω)v(ω′)/(η^±(ω)(ω − ω′)).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LSState {
    pub omega: f64,
    pub branch: Boundary,
    pub eta: Complex64,
    /// ⟨1|F^±_ω⟩ = λv(ω)/η^±(ω).
    pub discrete_amp: Complex64,
    /// Coefficient ∓iπλ²v(ω)²/η^± of the on-shell delta from the Plemelj split.
    pub on_shell: Complex64,
    lambda_v: f64,
}

impl LSState {
    /// Smooth (principal-value) part of ⟨ω′|F^±_ω⟩ at ω′ ≠ ω, given λv(ω′).
    pub fn field_smooth(&self, omega_p: f64, lambda_v_p: f64) -> Complex64 {
        self.discrete_amp * lambda_v_p / (self.omega - omega_p)
    }

    /// Total weight of δ(ω − ω′) in ⟨ω′|F^±_ω⟩.
    pub fn delta_weight(&self) -> Complex64 {
        1.0 + self.on_shell
    }

    /// ∫⟨ω′|F^±_ω⟩φ(ω′)dω′ for a real test function φ of the field modes.
    pub fn smear<F>(&self, ls: &LevelShift, phi: F) -> Result<Complex64>
    where
        F: Fn(f64) -> f64,
    {
        let p = ls.params;
        let pv = principal_value_integral(|x| p.v(x) * phi(x), self.omega, ls.omega_max, &ls.quad)?;
        Ok(self.delta_weight() * phi(self.omega) + self.discrete_amp * p.lambda * pv)
    }

    pub fn lambda_v(&self) -> f64 {
        self.lambda_v
    }
}

pub fn ls_state(ls: &LevelShift, omega: f64, branch: Boundary) -> Result<LSState> {
    let eta = ls.eta_boundary(omega, branch)?;
    let lambda_v = ls.params.lambda * ls.params.v(omega);
    let on_shell = Complex64::new(0.0, -branch.sign() * PI) * lambda_v * lambda_v / eta;
    Ok(LSState {
        omega,
        branch,
        eta,
        discrete_amp: lambda_v / eta,
        on_shell,
        lambda_v,
    })
}

/// Pole-separated coefficients at real ω.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeparationCoefficients {
    pub omega: f64,
    /// −1/(2πi·η⁺(ω)).
    pub a: Complex64,
    /// 1/(2πi·η⁻(ω)).
    pub a_c: Complex64,
    /// λv(ω); the Friedrichs B_{ω′ω} does not depend on its second index.
    pub b: f64,
    pub eta_plus: Complex64,
    pub eta_minus: Complex64,
}

impl SeparationCoefficients {
    /// B as a function of ω′.
    pub fn b_at(&self, ls: &LevelShift, omega_p: f64) -> f64 {
        ls.params.lambda * ls.params.v(omega_p)
    }

    /// ⟨1|Ψ⁺_ω⟩⟨Ψ⁺_ω|φ⟩ rebuilt from A, A^c and B:
    /// (A + A^c)·PV∫Bφ/(ω − ω′) + iπ(A^c − A)·B(ω)φ(ω).
    pub fn pole_form(&self, pv_b_phi: f64, phi_at_omega: f64) -> Complex64 {
        (self.a + self.a_c) * pv_b_phi + I * PI * (self.a_c - self.a) * self.b * phi_at_omega
    }

    /// Both sides of ⟨1|Ψ⁺⟩/⟨ω|V|Ψ⁺⟩ = ⟨Ψ⁺|1⟩/⟨Ψ⁺|V|ω⟩ evaluated from the
    /// scattering-state amplitudes; each equals 1/(λv(ω)).
    pub fn vertex_identity(&self, ls: &LevelShift) -> Result<(Complex64, Complex64)> {
        let st = ls_state(ls, self.omega, Boundary::Plus)?;
        if st.lambda_v == 0.0 {
            return Err(Error::Domain("vertex identity needs lambda v(w) != 0".into()));
        }
        // V|1⟩ only has field components: ⟨ω|V|Ψ⁺⟩ = λv(ω)⟨1|Ψ⁺⟩
        let lhs = st.discrete_amp / (st.lambda_v * st.discrete_amp);
        let rhs = st.discrete_amp.conj() / (st.lambda_v * st.discrete_amp.conj());
        Ok((lhs, rhs))
    }
}

pub fn separation_terms(ls: &LevelShift, omega: f64) -> Result<SeparationCoefficients> {
    let eta_plus = ls.eta_boundary(omega, Boundary::Plus)?;
    let eta_minus = ls.eta_boundary(omega, Boundary::Minus)?;
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    Ok(SeparationCoefficients {
        omega,
        a: -1.0 / (two_pi_i * eta_plus),
        a_c: 1.0 / (two_pi_i * eta_minus),
        b: ls.params.lambda * ls.params.v(omega),
        eta_plus,
        eta_minus,
    })
}

/// Relative mismatch between ⟨1|Ψ⁺_ω⟩⟨Ψ⁺_ω|φ⟩ computed from the scattering
/// state and from the separated coefficients, for a real field test function φ.
pub fn separation_residual<F>(ls: &LevelShift, omega: f64, phi: F) -> Result<f64>
where
    F: Fn(f64) -> f64 + Copy,
{
    let st = ls_state(ls, omega, Boundary::Plus)?;
    let direct = st.discrete_amp * st.smear(ls, phi)?.conj();
    let sep = separation_terms(ls, omega)?;
    let p = ls.params;
    let pv = principal_value_integral(|x| p.lambda * p.v(x) * phi(x), omega, ls.omega_max, &ls.quad)?;
    let rebuilt = sep.pole_form(pv, phi(omega));
    let scale = direct.norm().max(1e-300);
    Ok((direct - rebuilt).norm() / scale)
}

/// J(z, x) = ∫₀^Ω v(ω)cos(ωx)/(z − ω) dω for z off the positive real axis.
///
/// Integrated in u = √ω so the √ω endpoint behaviour becomes polynomial.
pub fn field_transform(ls: &LevelShift, z: Complex64, x: f64) -> Result<Complex64> {
    if z.im == 0.0 && z.re >= 0.0 {
        return Err(Error::Domain(format!("field transform needs z off the cut, got {z}")));
    }
    let m2 = ls.params.cutoff_m * ls.params.cutoff_m;
    let upper = ls.omega_max.sqrt();
    let mut quad = ls.quad;
    quad.abs_tol = quad.abs_tol.max(1e-12);
    if x != 0.0 {
        quad.max_panel = Some(PI / (upper * x.abs()).max(1.0));
    }
    let bp: Vec<f64> = if z.re > 0.0 { vec![z.re.sqrt()] } else { vec![] };
    let r = integrate(
        |u| {
            let w = u * u;
            let v = std::f64::consts::SQRT_2 * u / (1.0 + w * w / m2);
            (2.0 * u * v * (w * x).cos()) / (z - w)
        },
        0.0,
        upper,
        &bp,
        &quad,
    )?;
    Ok(r.value)
}

/// ⟨x|φ_z⟩ = N^{1/2}·λ/√π·[J(z, x) − 2πi·v(z)·cos(zx)].
///
/// The second term is the residue picked up when the transform is continued
/// from above through the cut; it produces the e^{|Im z||x|} growth.
pub fn gamow_field(ls: &LevelShift, pole: &ResonancePole, x: f64) -> Result<Complex64> {
    let z = pole.z;
    let lam = ls.params.lambda;
    if lam == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let j = field_transform(ls, z, x)?;
    let vz = form_factor(z, &ls.params)?;
    let residue_term = Complex64::new(0.0, 2.0 * PI) * vz * (z * x).cos();
    Ok(pole.residue.sqrt() * lam / PI.sqrt() * (j - residue_term))
}
