use num_complex::Complex64;

use super::arrowhead::SpectralDecomposition;
use super::state::StateVector;
use crate::error::{Error, Result};
use crate::model::HermitianMatrix;
use crate::parallel::Execution;

/// e^{−iHt} applied through a stored eigendecomposition.
#[derive(Clone, Debug)]
pub struct ExactPropagator<'a> {
    sd: &'a SpectralDecomposition,
    /// Vᵀψ₀.
    coeffs: Vec<Complex64>,
    label: String,
}

impl<'a> ExactPropagator<'a> {
    pub fn new(sd: &'a SpectralDecomposition, psi0: &StateVector) -> Result<Self> {
        Self::with_execution(sd, psi0, Execution::default())
    }

    pub fn with_execution(sd: &'a SpectralDecomposition, psi0: &StateVector, exec: Execution) -> Result<Self> {
        if psi0.dim() != sd.dim() {
            return Err(Error::DimensionMismatch {
                expected: sd.dim(),
                found: psi0.dim(),
            });
        }
        let coeffs = exec.map_range(sd.dim(), |k| {
            sd.vector(k).iter().zip(&psi0.amplitudes).map(|(v, a)| a * v).sum()
        });
        Ok(ExactPropagator {
            sd,
            coeffs,
            label: psi0.label.clone(),
        })
    }

    fn phased(&self, t: f64) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .zip(&self.sd.eigenvalues)
            .map(|(c, mu)| c * Complex64::from_polar(1.0, -mu * t))
            .collect()
    }

    /// ψ(t) = V e^{−iΛt} Vᵀ ψ₀.
    pub fn state_at(&self, t: f64) -> StateVector {
        let phased = self.phased(t);
        let dim = self.sd.dim();
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (k, c) in phased.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(self.sd.vector(k)) {
                *o += c * v;
            }
        }
        StateVector {
            amplitudes: out,
            label: self.label.clone(),
        }
    }

    /// Component i of ψ(t) in O(dim).
    pub fn component_at(&self, i: usize, t: f64) -> Complex64 {
        self.phased(t)
            .iter()
            .enumerate()
            .map(|(k, c)| c * self.sd.component(i, k))
            .sum()
    }
}

/// ψ(t) for every requested time.
pub fn propagate_exact(sd: &SpectralDecomposition, psi0: &StateVector, times: &[f64]) -> Result<Vec<StateVector>> {
    propagate_exact_with(sd, psi0, times, Execution::default())
}

pub fn propagate_exact_with(
    sd: &SpectralDecomposition,
    psi0: &StateVector,
    times: &[f64],
    exec: Execution,
) -> Result<Vec<StateVector>> {
    let prop = ExactPropagator::with_execution(sd, psi0, exec)?;
    Ok(exec.map(times, |&t| prop.state_at(t)))
}

/// States recorded along a fixed-step integration.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<StateVector>,
    /// max over steps of |‖ψ_{n+1}‖ − ‖ψ_n‖|.
    pub max_step_norm_drift: f64,
}

// Padé(2,2): e^x ≈ Π_j (1 − x/r_j)/(1 + x/r_j), r = −3 ± i√3.
fn pade_roots() -> [Complex64; 2] {
    let s = 3f64.sqrt();
    [Complex64::new(-3.0, s), Complex64::new(-3.0, -s)]
}

/// Solves (I + cH)y = rhs for an arrowhead H in O(dim).
fn bordered_solve(h: &HermitianMatrix, c: Complex64, rhs: &[Complex64], y: &mut [Complex64]) -> Result<()> {
    let mut schur = 1.0 + c * h.diagonal[0];
    let mut r0 = rhs[0];
    for (n, b) in h.border.iter().enumerate() {
        let piv = 1.0 + c * h.diagonal[n + 1];
        if piv.norm() == 0.0 {
            return Err(Error::LinearSolve(format!("zero pivot at mode {}", n + 1)));
        }
        let cb = c * b;
        schur -= cb * cb / piv;
        r0 -= cb * rhs[n + 1] / piv;
    }
    if schur.norm() == 0.0 || !schur.re.is_finite() {
        return Err(Error::LinearSolve("singular Schur complement".into()));
    }
    y[0] = r0 / schur;
    for (n, b) in h.border.iter().enumerate() {
        let piv = 1.0 + c * h.diagonal[n + 1];
        y[n + 1] = (rhs[n + 1] - c * b * y[0]) / piv;
    }
    Ok(())
}

/// One fourth-order Crank–Nicolson step.
pub fn cn4_step(h: &HermitianMatrix, psi: &[Complex64], dt: f64) -> Result<Vec<Complex64>> {
    let mut cur = psi.to_vec();
    let mut next = vec![Complex64::new(0.0, 0.0); psi.len()];
    for r in pade_roots() {
        // x = −iHΔ: (I + x/r) y = (I − x/r) ψ
        let c = Complex64::new(0.0, -dt) / r;
        let hx = h.apply(&cur);
        let rhs: Vec<Complex64> = cur.iter().zip(&hx).map(|(a, b)| a - c * b).collect();
        bordered_solve(h, c, &rhs, &mut next)?;
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(cur)
}

/// Integrates n_steps of size dt, recording every `record_every` steps (and the start).
pub fn propagate_cn4(
    h: &HermitianMatrix,
    psi0: &StateVector,
    dt: f64,
    n_steps: usize,
    record_every: usize,
) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidArgument(format!("time step must be positive, got {dt}")));
    }
    if psi0.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: psi0.dim(),
        });
    }
    let every = record_every.max(1);
    let mut psi = psi0.amplitudes.clone();
    let mut norm = psi0.norm();
    let mut drift: f64 = 0.0;
    let mut times = vec![0.0];
    let mut states = vec![psi0.clone()];
    for step in 1..=n_steps {
        psi = cn4_step(h, &psi, dt)?;
        let nn = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        drift = drift.max((nn - norm).abs());
        norm = nn;
        if step % every == 0 {
            times.push(step as f64 * dt);
            states.push(StateVector {
                amplitudes: psi.clone(),
                label: psi0.label.clone(),
            });
        }
    }
    Ok(Trajectory {
        dt,
        times,
        states,
        max_step_norm_drift: drift,
    })
}

/// Step-size policy for CN4.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DtPolicy {
    /// Start at 0.02 and halve until successive trajectories agree.
    Auto,
    Fixed(f64),
}

/// Result of the automatic step selection.
#[derive(Clone, Debug)]
pub struct AutoDt {
    pub trajectory: Trajectory,
    /// max amplitude difference to the previous (coarser) trajectory.
    pub last_change: f64,
    pub halvings: usize,
}

fn max_state_difference(a: &Trajectory, b: &Trajectory) -> f64 {
    a.states
        .iter()
        .zip(&b.states)
        .flat_map(|(x, y)| x.amplitudes.iter().zip(&y.amplitudes).map(|(p, q)| (p - q).norm()))
        .fold(0.0, f64::max)
}

/// Runs CN4 to `t_end`, recording every `record_interval`, with dt chosen by `policy`.
///
/// `t_end` and `record_interval` must be integer multiples of every trial step.
pub fn propagate_cn4_policy(
    h: &HermitianMatrix,
    psi0: &StateVector,
    t_end: f64,
    record_interval: f64,
    policy: DtPolicy,
    tolerance: f64,
) -> Result<AutoDt> {
    let run = |dt: f64| -> Result<Trajectory> {
        let n_steps = (t_end / dt).round() as usize;
        let every = (record_interval / dt).round().max(1.0) as usize;
        if ((n_steps as f64) * dt - t_end).abs() > 1e-9 * t_end.max(1.0)
            || ((every as f64) * dt - record_interval).abs() > 1e-9 * record_interval.max(1.0)
        {
            return Err(Error::InvalidArgument(format!(
                "dt = {dt} does not divide t_end = {t_end} and the record interval {record_interval}"
            )));
        }
        propagate_cn4(h, psi0, dt, n_steps, every)
    };
    match policy {
        DtPolicy::Fixed(dt) => Ok(AutoDt {
            trajectory: run(dt)?,
            last_change: f64::NAN,
            halvings: 0,
        }),
        DtPolicy::Auto => {
            let mut dt = 0.02;
            let mut prev = run(dt)?;
            for halvings in 1..=12 {
                dt *= 0.5;
                let next = run(dt)?;
                let change = max_state_difference(&prev, &next);
                log::debug!("cn4 dt = {dt}: change {change:e}");
                if change < tolerance {
                    return Ok(AutoDt {
                        trajectory: next,
                        last_change: change,
                        halvings,
                    });
                }
                prev = next;
            }
            Err(Error::NoConvergence {
                iterations: 12,
                residual: f64::NAN,
            })
        }
    }
}
