//! The three total-vs-restricted comparisons and the pole report.

use friedrichs::evolution::{
    diagonalize, make_state, propagate_cn4_policy, propagate_exact, DtPolicy, ExactPropagator,
    SpectralDecomposition, StateLabel, StateVector, Trajectory,
};
use friedrichs::model::{assemble_hamiltonian, DiscreteModel, HermitianMatrix};
use friedrichs::parallel::Execution;
use friedrichs::restriction::{
    restricted_correlation_with, restricted_emission, restricted_survival, FreeFieldCorrelation,
};
use friedrichs::spectral::{default_guess, field_transform, find_pole, LevelShift, ResonancePole, Sheet};
use friedrichs::Complex64;

use crate::config::RunConfig;
use crate::oracle::OracleEta;
use crate::report::{Check, PoleRecord, ScenarioReport, Series};
use crate::HarnessError;

type Result<T> = std::result::Result<T, HarnessError>;
type ScenarioParts = (Series, Vec<(String, f64)>, Vec<Check>);

/// Finds the pole and cross-checks it against the independent oracle.
pub fn report_pole(cfg: &RunConfig) -> Result<PoleRecord> {
    let ls = cfg.level_shift()?;
    pole_record(&ls)
}

fn pole_record(ls: &LevelShift) -> Result<PoleRecord> {
    let pole = find_pole(ls, default_guess(ls))?;
    let p = &ls.params;
    let oracle = OracleEta::new(p.omega1, p.lambda, p.cutoff_m, ls.omega_max);
    let oracle_z = oracle.pole();
    let oracle_residue = oracle.residue(oracle_z);
    let d = ls.eta_derivative(pole.z, Sheet::Second)?;
    Ok(PoleRecord {
        pole,
        oracle_z,
        oracle_residue,
        residue_identity: (pole.residue * d - 1.0).norm(),
    })
}

/// Shared discretized system: matrix, eigendecomposition and pole.
struct System {
    ls: LevelShift,
    dm: DiscreteModel,
    h: HermitianMatrix,
    sd: SpectralDecomposition,
    pole: PoleRecord,
}

impl System {
    fn build(cfg: &RunConfig) -> Result<Self> {
        let ls = cfg.level_shift()?;
        let pole = pole_record(&ls)?;
        let dm = cfg.discrete_model()?;
        let h = assemble_hamiltonian(&dm);
        let sd = diagonalize(&h)?;
        Ok(System { ls, dm, h, sd, pole })
    }

    fn z(&self) -> &ResonancePole {
        &self.pole.pole
    }
}

fn in_window(grid: &[f64], a: f64, b: f64) -> Vec<usize> {
    (0..grid.len()).filter(|&k| grid[k] >= a && grid[k] <= b).collect()
}

/// Least-squares slope of y against x.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(f64::NAN, |m, v| if m.is_nan() || v > m { v } else { m })
}

fn trajectory_deviation(tr: &Trajectory, exact: &[StateVector]) -> f64 {
    max_of(
        tr.states
            .iter()
            .zip(exact)
            .flat_map(|(a, b)| a.amplitudes.iter().zip(&b.amplitudes).map(|(p, q)| (p - q).norm())),
    )
}

/// |⟨1|e^{−iHt}|1⟩|² against the restricted pole amplitude on a two-sided
/// time grid; CN4 runs forward and is checked against the spectral propagator.
pub fn run_survival(cfg: &RunConfig) -> Result<ScenarioReport> {
    let sys = System::build(cfg)?;
    let pole = *sys.z();
    let exec = Execution::default();
    let psi0 = make_state(StateLabel::Discrete, &sys.dm)?;
    let prop = ExactPropagator::new(&sys.sd, &psi0)?;
    let grid = cfg.survival.t.points();
    let total = exec.map(&grid, |&t| prop.component_at(0, t));
    let restricted: Vec<Complex64> = grid.iter().map(|&t| restricted_survival(&pole, t)).collect();
    // the free evolution never returns to |1⟩, so the rest is total − restricted
    let residual: Vec<Complex64> = total.iter().zip(&restricted).map(|(a, b)| a - b).collect();
    let exact_series = Series {
        name: "survival".into(),
        grid_label: "t".into(),
        grid: grid.clone(),
        total,
        restricted,
        residual,
    };

    let tol = &cfg.tolerances;
    let rate = pole.decay_rate();
    let [a, b] = cfg.survival.window;
    let mut metrics = vec![("decay_rate_pole".to_string(), rate)];
    let mut checks = Vec::new();

    for (tag, lo, hi, sign) in [("positive", a, b, -1.0), ("negative", -b, -a, 1.0)] {
        let idx = in_window(&grid, lo, hi);
        let p_tot = exact_series.abs2_total();
        let p_res = exact_series.abs2_restricted();
        let xs: Vec<f64> = idx.iter().map(|&k| grid[k]).collect();
        let ys: Vec<f64> = idx.iter().map(|&k| p_tot[k].ln()).collect();
        let fitted = if idx.len() >= 2 { sign * ls_slope(&xs, &ys) } else { f64::NAN };
        let pointwise = max_of(idx.iter().map(|&k| ((p_tot[k] - p_res[k]) / p_res[k]).abs()));
        let rest = max_of(idx.iter().map(|&k| exact_series.residual[k].norm() / exact_series.restricted[k].norm()));
        metrics.push((format!("{tag}.fitted_decay_rate"), fitted));
        metrics.push((format!("{tag}.max_pointwise_rel_error"), pointwise));
        metrics.push((format!("{tag}.max_rest_fraction"), rest));
        checks.push(Check::below(format!("{tag}_decay_rate_rel"), ((fitted - rate) / rate).abs(), tol.decay_rate_rel));
        checks.push(Check::below(format!("{tag}_pointwise_rel"), pointwise, tol.survival_pointwise_rel));
        checks.push(Check::below(format!("{tag}_rest_fraction"), rest, tol.rest_fraction));
    }

    // V·Vᵀ = 1 holds to O(dim·ε) for a full eigenbasis
    let basis_eps = 100.0 * sys.dm.dim() as f64 * f64::EPSILON;
    let at_zero = (prop.component_at(0, 0.0) - 1.0).norm();
    checks.push(Check::below("total_at_zero", at_zero, basis_eps));
    let reversal = max_of(grid.iter().map(|&t| (prop.component_at(0, -t) - prop.component_at(0, t).conj()).norm()));
    checks.push(Check::below("time_reversal", reversal, 1e-12));
    let r_sym = max_of(
        grid.iter()
            .map(|&t| (restricted_survival(&pole, -t).norm() - restricted_survival(&pole, t).norm()).abs()),
    );
    checks.push(Check::below("restricted_reversal", r_sym, 1e-14));

    let mut series = vec![exact_series];
    let step = cfg.survival.t.step;
    let t_end = (cfg.survival.t.max / step + 1e-9).floor() * step;
    if t_end > 0.0 {
        let (cn4_series, cn4_metrics, cn4_checks) = survival_cn4(cfg, &sys, &psi0, &prop, t_end, step)?;
        series.push(cn4_series);
        metrics.extend(cn4_metrics);
        checks.extend(cn4_checks);
    }

    Ok(ScenarioReport {
        scenario: "survival".into(),
        config_echo: cfg.to_toml(),
        pole: sys.pole,
        series,
        metrics,
        checks,
    })
}

fn survival_cn4(
    cfg: &RunConfig,
    sys: &System,
    psi0: &StateVector,
    prop: &ExactPropagator,
    t_end: f64,
    step: f64,
) -> Result<ScenarioParts> {
    let pole = sys.z();
    let policy = cfg.dt_policy()?;
    let run = propagate_cn4_policy(&sys.h, psi0, t_end, step, policy, cfg.evolution.tolerance)?;
    let tr = &run.trajectory;
    let exact = propagate_exact(&sys.sd, psi0, &tr.times)?;
    let deviation = trajectory_deviation(tr, &exact);
    let norms: Vec<f64> = exact.iter().map(|s| s.norm()).collect();
    let exact_drift = max_of(norms.windows(2).map(|w| (w[1] - w[0]).abs()));
    let exact_norm_error = max_of(norms.iter().map(|n| (n - 1.0).abs()));
    let mut metrics = vec![
        ("cn4.dt".to_string(), tr.dt),
        ("cn4.halvings".to_string(), run.halvings as f64),
        ("cn4.max_deviation".to_string(), deviation),
        ("cn4.max_step_norm_drift".to_string(), tr.max_step_norm_drift),
        ("exact.max_step_norm_drift".to_string(), exact_drift),
        ("exact.max_norm_error".to_string(), exact_norm_error),
    ];
    let mut checks = vec![
        Check::below("cn4_vs_exact", deviation, cfg.tolerances.cn4_deviation),
        Check::below("cn4_norm_drift", tr.max_step_norm_drift, 1e-12),
        Check::below("exact_norm_drift", exact_drift, 1e-12),
        Check::below("exact_norm_error", exact_norm_error, 100.0 * sys.dm.dim() as f64 * f64::EPSILON),
    ];
    // the step must halve cleanly into the record interval for the coarse rerun
    match propagate_cn4_policy(&sys.h, psi0, t_end, step, DtPolicy::Fixed(2.0 * tr.dt), 0.0) {
        Ok(coarse) => {
            let ratio = trajectory_deviation(&coarse.trajectory, &exact) / deviation;
            metrics.push(("cn4.halving_ratio".into(), ratio));
            checks.push(Check::above("cn4_halving_ratio", ratio, 8.0));
        }
        Err(e) => log::warn!("skipping dt-halving check: {e}"),
    }
    let total: Vec<Complex64> = tr.states.iter().map(|s| s.amplitudes[0]).collect();
    let restricted: Vec<Complex64> = tr.times.iter().map(|&t| restricted_survival(pole, t)).collect();
    let residual = total.iter().zip(&restricted).map(|(a, b)| a - b).collect();
    // keep the spectral and CN4 values apart in the log for quick inspection
    if let Some(&t) = tr.times.last() {
        log::info!("cn4 dt = {}: ⟨1|ψ({t})⟩ = {} (exact {})", tr.dt, total[total.len() - 1], prop.component_at(0, t));
    }
    let series = Series {
        name: "survival_cn4".into(),
        grid_label: "t".into(),
        grid: tr.times.clone(),
        total,
        restricted,
        residual,
    };
    Ok((series, metrics, checks))
}

/// Location of the steepest drop of a positive series on x > 0, as the
/// midpoint of the two samples where log p falls fastest.
pub fn front_position(grid: &[f64], p: &[f64], x_max: f64) -> f64 {
    let mut best = (f64::NEG_INFINITY, f64::NAN);
    for k in 0..grid.len().saturating_sub(1) {
        if grid[k] <= 0.0 || grid[k + 1] > x_max || p[k] <= 0.0 {
            continue;
        }
        let drop = p[k].ln() - p[k + 1].max(f64::MIN_POSITIVE).ln();
        if drop > best.0 {
            best = (drop, 0.5 * (grid[k] + grid[k + 1]));
        }
    }
    best.1
}

/// |⟨x|e^{−iHt}|1⟩|² against the restricted emission amplitude at fixed t.
pub fn run_emission(cfg: &RunConfig) -> Result<ScenarioReport> {
    let sys = System::build(cfg)?;
    let pole = *sys.z();
    let exec = Execution::default();
    let t = cfg.emission.t;
    let grid = cfg.emission.x.points();
    for &x in &grid {
        sys.dm.check_in_box(x)?;
    }
    let psi0 = make_state(StateLabel::Discrete, &sys.dm)?;
    let psi_t = ExactPropagator::new(&sys.sd, &psi0)?.state_at(t);
    let at = |x: f64| -> friedrichs::Result<Complex64> { make_state(StateLabel::Position(x), &sys.dm)?.inner(&psi_t) };
    let total = exec.try_map(&grid, |&x| at(x))?;
    let mirrored = exec.try_map(&grid, |&x| at(-x))?;
    let restricted = exec.try_map(&grid, |&x| restricted_emission(&sys.ls, &pole, t, x))?;
    let residual = total.iter().zip(&restricted).map(|(a, b)| a - b).collect();
    let s = Series {
        name: "emission".into(),
        grid_label: "x".into(),
        grid: grid.clone(),
        total,
        restricted,
        residual,
    };

    let tol = &cfg.tolerances;
    let p_tot = s.abs2_total();
    let p_res = s.abs2_restricted();
    let peak = max_of(p_tot.iter().copied());
    let tail = max_of((0..grid.len()).filter(|&k| grid[k].abs() >= 2.0 * t).map(|k| p_tot[k])) / peak;
    let inside: Vec<usize> = (0..grid.len()).filter(|&k| grid[k].abs() <= t - 2.0).collect();
    let num: f64 = inside.iter().map(|&k| (p_tot[k] - p_res[k]).powi(2)).sum();
    let den: f64 = inside.iter().map(|&k| p_tot[k].powi(2)).sum();
    let l2 = (num / den).sqrt();
    let front_total = front_position(&grid, &p_tot, 2.0 * t);
    let front_restr = front_position(&grid, &p_res, 2.0 * t);
    let spacing = cfg.emission.x.step;
    let parity = max_of(s.total.iter().zip(&mirrored).map(|(a, b)| (a - b).norm())) / peak.sqrt();

    let metrics = vec![
        ("t".to_string(), t),
        ("peak_total".to_string(), peak),
        ("tail_fraction".to_string(), tail),
        ("window_rel_l2".to_string(), l2),
        ("front_total".to_string(), front_total),
        ("front_restricted".to_string(), front_restr),
        ("parity_total".to_string(), parity),
    ];
    let checks = vec![
        Check::below("causal_tail", tail, tol.emission_tail),
        Check::below("window_rel_l2", l2, tol.emission_l2),
        Check::below("front_total_offset", (front_total - t).abs(), spacing * (1.0 + 1e-9)),
        Check::below("front_restricted_offset", (front_restr - t).abs(), spacing * (1.0 + 1e-9)),
        Check::below("parity_total", parity, 1e-10),
    ];
    Ok(ScenarioReport {
        scenario: "emission".into(),
        config_echo: cfg.to_toml(),
        pole: sys.pole,
        series: vec![s],
        metrics,
        checks,
    })
}

/// Positions of the `n` largest local maxima of p, at least `gap` apart, sorted.
pub fn largest_peaks(grid: &[f64], p: &[f64], n: usize, gap: f64) -> Vec<f64> {
    let mut maxima: Vec<usize> = (1..p.len().saturating_sub(1))
        .filter(|&k| p[k] >= p[k - 1] && p[k] >= p[k + 1])
        .collect();
    maxima.sort_by(|&a, &b| p[b].total_cmp(&p[a]));
    let mut chosen: Vec<f64> = Vec::new();
    for k in maxima {
        if chosen.iter().all(|&x| (x - grid[k]).abs() > gap) {
            chosen.push(grid[k]);
            if chosen.len() == n {
                break;
            }
        }
    }
    chosen.sort_by(f64::total_cmp);
    chosen
}

fn nearest(grid: &[f64], x: f64) -> usize {
    (0..grid.len()).min_by(|&a, &b| (grid[a] - x).abs().total_cmp(&(grid[b] - x).abs())).unwrap_or(0)
}

/// |⟨x₁|e^{−iHt}|x₂⟩|² against the discrete free propagator plus the
/// restricted correlation, at fixed t and x₂.
pub fn run_correlation(cfg: &RunConfig) -> Result<ScenarioReport> {
    let sys = System::build(cfg)?;
    let pole = *sys.z();
    let exec = Execution::default();
    let (t, x2) = (cfg.correlation.t, cfg.correlation.x2);
    let grid = cfg.correlation.x1.points();
    for &x in grid.iter().chain([x2].iter()) {
        sys.dm.check_in_box(x)?;
    }
    let ket = make_state(StateLabel::Position(x2), &sys.dm)?;
    let prop = ExactPropagator::new(&sys.sd, &ket)?;
    let psi_t = prop.state_at(t);
    // e^{−iH₀t}|x₂⟩ on the same discrete modes
    let mut free_amps = ket.amplitudes.clone();
    for (n, a) in free_amps.iter_mut().enumerate().skip(1) {
        *a *= Complex64::new(0.0, -sys.dm.omega[n - 1] * t).exp();
    }
    let free_t = StateVector::new(free_amps, "free")?;

    let j2 = field_transform(&sys.ls, pole.z, x2)?;
    let rows = exec.try_map(&grid, |&x1| -> friedrichs::Result<(Complex64, Complex64, Complex64)> {
        let bra = make_state(StateLabel::Position(x1), &sys.dm)?;
        let j1 = field_transform(&sys.ls, pole.z, x1)?;
        let r = restricted_correlation_with(&sys.ls, &pole, t, (x1, j1), (x2, j2))?;
        Ok((bra.inner(&psi_t)?, bra.inner(&free_t)?, r))
    })?;
    let total: Vec<Complex64> = rows.iter().map(|r| r.0).collect();
    let free: Vec<Complex64> = rows.iter().map(|r| r.1).collect();
    let restricted: Vec<Complex64> = rows.iter().map(|r| r.2).collect();
    let scattered: Vec<Complex64> = total.iter().zip(&free).map(|(a, b)| a - b).collect();
    let residual: Vec<Complex64> = scattered.iter().zip(&restricted).map(|(a, b)| a - b).collect();

    let tol = &cfg.tolerances;
    let spacing = cfg.correlation.x1.step;
    let p_tot: Vec<f64> = total.iter().map(|a| a.norm_sqr()).collect();
    let mut expected = FreeFieldCorrelation::delta_positions_x1(t, x2).to_vec();
    expected.retain(|&x| x >= grid[0] && x <= grid[grid.len() - 1]);
    expected.sort_by(f64::total_cmp);
    let peaks = largest_peaks(&grid, &p_tot, expected.len(), 1.0);
    let peak_offset = if peaks.len() == expected.len() {
        max_of(peaks.iter().zip(&expected).map(|(a, b)| (a - b).abs()))
    } else {
        f64::INFINITY
    };

    let front = t - x2.abs();
    let r_in = restricted[nearest(&grid, front - 0.5)].norm();
    let r_out = restricted[nearest(&grid, front + 0.5)].norm();
    let front_ratio = r_in / r_out;

    // best complex scale of the restricted term inside the front, away from peaks
    let region: Vec<usize> = (0..grid.len())
        .filter(|&k| grid[k].abs() <= front - 1.0 && expected.iter().all(|&d| (grid[k] - d).abs() > 1.0))
        .collect();
    let rr: f64 = region.iter().map(|&k| restricted[k].norm_sqr()).sum();
    let rd: Complex64 = region.iter().map(|&k| restricted[k].conj() * scattered[k]).sum();
    let scale = rd / rr;
    let dd: f64 = region.iter().map(|&k| scattered[k].norm_sqr()).sum();
    let l2_of = |s: Complex64| {
        let e: f64 = region.iter().map(|&k| (scattered[k] - s * restricted[k]).norm_sqr()).sum();
        (e / dd).sqrt()
    };
    let l2_fit = l2_of(scale);
    let l2_raw = l2_of(Complex64::new(1.0, 0.0));

    // exchange symmetry of the total on a few sample points
    let probes: Vec<f64> = [0.0, 0.25, 0.5, 0.75, 1.0]
        .iter()
        .map(|f| grid[((grid.len() - 1) as f64 * f) as usize])
        .collect();
    let ket_x2 = make_state(StateLabel::Position(x2), &sys.dm)?;
    let mut exchange: f64 = 0.0;
    for &x1 in &probes {
        let k = nearest(&grid, x1);
        let swapped = ExactPropagator::new(&sys.sd, &make_state(StateLabel::Position(x1), &sys.dm)?)?
            .state_at(t);
        exchange = exchange.max((ket_x2.inner(&swapped)? - total[k]).norm());
    }

    let metrics = vec![
        ("t".to_string(), t),
        ("x2".to_string(), x2),
        ("peak_offset".to_string(), peak_offset),
        ("front".to_string(), front),
        ("front_ratio_restricted".to_string(), front_ratio),
        ("best_fit_scale.re".to_string(), scale.re),
        ("best_fit_scale.im".to_string(), scale.im),
        ("best_fit_scale.abs".to_string(), scale.norm()),
        ("inside_rel_l2_fitted".to_string(), l2_fit),
        ("inside_rel_l2_unscaled".to_string(), l2_raw),
        ("exchange_symmetry".to_string(), exchange),
    ];
    for (i, p) in peaks.iter().enumerate() {
        log::info!("delta peak {i} at x1 = {p}");
    }
    let checks = vec![
        Check::below("delta_peak_offset", peak_offset, spacing * (1.0 + 1e-9)),
        Check::above("restricted_front_ratio", front_ratio, tol.front_ratio),
        Check::below("inside_rel_l2", l2_fit, tol.correlation_l2),
        Check::below("exchange_symmetry", exchange, 1e-10),
    ];
    let series = vec![
        Series {
            name: "correlation".into(),
            grid_label: "x1".into(),
            grid: grid.clone(),
            total,
            restricted: restricted.clone(),
            residual: residual.clone(),
        },
        Series {
            name: "correlation_scattered".into(),
            grid_label: "x1".into(),
            grid,
            total: scattered,
            restricted,
            residual,
        },
    ];
    Ok(ScenarioReport {
        scenario: "correlation".into(),
        config_echo: cfg.to_toml(),
        pole: sys.pole,
        series,
        metrics,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 - 0.5 * v).collect();
        assert!((ls_slope(&x, &y) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn peaks_and_fronts() {
        let grid: Vec<f64> = (0..101).map(|k| -5.0 + 0.1 * k as f64).collect();
        let p: Vec<f64> = grid.iter().map(|x| (-(x - 2.0f64).powi(2) * 50.0).exp() + 0.5 * (-(x + 3.0f64).powi(2) * 50.0).exp()).collect();
        let peaks = largest_peaks(&grid, &p, 2, 1.0);
        assert!((peaks[0] + 3.0).abs() < 1e-9 && (peaks[1] - 2.0).abs() < 1e-9);
        let step: Vec<f64> = grid.iter().map(|&x| if x < 1.95 { 1.0 } else { 1e-6 }).collect();
        assert!((front_position(&grid, &step, 4.0) - 1.95).abs() < 1e-9);
    }
}
