//! Hardy-projection and T± invariant suites on a seeded corpus.

use std::f64::consts::PI;
use std::fmt::Write as _;

use friedrichs::hardy::{decompose, eval_complex, paley_wiener_residual, project, CayleyGrid, SampledFunction, Side};
use friedrichs::parallel::Execution;
use friedrichs::quadrature::{integrate, QuadConfig};
use friedrichs::restriction::{
    collapse_residual, default_test_function, rational_test_function, t_suite, Case, PoleChoice, RestrictionCase,
};
use friedrichs::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::report::Check;
use crate::HarnessError;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// c/(ω − p)^k.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoleTerm {
    pub c: Complex64,
    pub p: Complex64,
    pub k: i32,
}

/// Sum of pole terms plus an optional Gaussian bump a·exp(−((ω − μ)/s)²).
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusFunction {
    pub label: String,
    pub poles: Vec<PoleTerm>,
    pub bump: Option<(f64, f64, f64)>,
}

impl CorpusFunction {
    pub fn at(&self, w: f64) -> Complex64 {
        let z = Complex64::new(w, 0.0);
        let mut v: Complex64 = self.poles.iter().map(|t| t.c / (z - t.p).powi(t.k)).sum();
        if let Some((a, mu, s)) = self.bump {
            v += a * (-((w - mu) / s).powi(2)).exp();
        }
        v
    }

    pub fn sample(&self, grid: CayleyGrid) -> friedrichs::Result<SampledFunction> {
        SampledFunction::from_fn(grid, self.label.clone(), |w| self.at(w))
    }
}

/// `n` functions; entry 0 is identically zero.
pub fn corpus(seed: u64, n: usize) -> Vec<CorpusFunction> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![CorpusFunction {
        label: "zero".into(),
        poles: vec![],
        bump: None,
    }];
    for i in 1..n {
        let count = rng.gen_range(1..=3);
        let poles = (0..count)
            .map(|_| {
                let im: f64 = rng.gen_range(0.4..3.0);
                PoleTerm {
                    c: Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    p: Complex64::new(rng.gen_range(-4.0..4.0), if rng.gen_bool(0.5) { im } else { -im }),
                    k: rng.gen_range(1..=2),
                }
            })
            .collect();
        let bump = if rng.gen_bool(0.5) {
            Some((rng.gen_range(-1.0..1.0), rng.gen_range(-3.0..3.0), rng.gen_range(0.5..2.0)))
        } else {
            None
        };
        out.push(CorpusFunction {
            label: format!("f{i:02}"),
            poles,
            bump,
        });
    }
    out
}

/// (±1/2πi)∫f(ω)/(ω − y)dω by adaptive quadrature in θ, ω = s·tan(θ/2).
pub fn cauchy_quadrature(f: &CorpusFunction, side: Side, y: Complex64, scale: f64) -> friedrichs::Result<Complex64> {
    let integrand = |th: f64| {
        let x = (0.5 * th).tan();
        let w = scale * x;
        f.at(w) / (w - y) * (0.5 * scale * (1.0 + x * x))
    };
    let mut bp: Vec<f64> = f.poles.iter().map(|t| 2.0 * (t.p.re / scale).atan()).collect();
    bp.push(2.0 * (y.re / scale).atan());
    if let Some((_, mu, _)) = f.bump {
        bp.push(2.0 * (mu / scale).atan());
    }
    let quad = QuadConfig::default().with_abs_tol(1e-12).with_max_panel(0.25);
    let v = integrate(integrand, -PI, PI, &bp, &quad)?.value / (2.0 * PI * I);
    Ok(match side {
        Side::Plus => v,
        Side::Minus => -v,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelftestSummary {
    pub rows: Vec<(String, Check)>,
}

impl SelftestSummary {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|(_, c)| c.passed)
    }

    pub fn failures(&self) -> Vec<&(String, Check)> {
        self.rows.iter().filter(|(_, c)| !c.passed).collect()
    }

    /// Largest value among rows of `suite` whose check name ends in `kind`.
    pub fn worst(&self, suite: &str, kind: &str) -> f64 {
        self.rows
            .iter()
            .filter(|(s, c)| s == suite && c.name.ends_with(kind))
            .map(|(_, c)| c.value)
            .fold(0.0, f64::max)
    }

    pub fn table(&self) -> String {
        let mut s = format!("{:<12} {:<44} {:>12} {:>10}  result\n", "suite", "check", "residual", "limit");
        for (suite, c) in &self.rows {
            let _ = writeln!(
                s,
                "{:<12} {:<44} {:>12.3e} {:>10.1e}  {}",
                suite,
                c.name,
                c.value,
                c.threshold,
                if c.passed { "pass" } else { "FAIL" }
            );
        }
        let _ = writeln!(s, "{} checks, {} failed", self.rows.len(), self.failures().len());
        s
    }
}

const CORPUS_SIZE: usize = 20;

pub fn hardy_suite(cfg: &RunConfig) -> Result<Vec<(String, Check)>, HarnessError> {
    let tol = &cfg.tolerances;
    let grid = CayleyGrid::new(2048, 2.0)?;
    let fs = corpus(cfg.seed, CORPUS_SIZE);
    let per_function = Execution::default().try_map(&fs, |f| -> friedrichs::Result<Vec<Check>> {
        let sf = f.sample(grid)?;
        let nf = sf.norm();
        let pair = decompose(&sf)?;
        let mut checks = Vec::new();
        if f.poles.is_empty() && f.bump.is_none() {
            // exact zeros, not merely small
            let all = pair.recon_residual
                + pair.plus.max_abs()
                + pair.minus.max_abs()
                + paley_wiener_residual(&sf, Side::Plus)
                + paley_wiener_residual(&sf, Side::Minus);
            checks.push(Check::below(format!("{}/all_residuals_zero", f.label), all, f64::MIN_POSITIVE));
            return Ok(checks);
        }
        checks.push(Check::below(format!("{}/completeness", f.label), pair.recon_residual, tol.projection));
        for (side, part) in [(Side::Plus, &pair.plus), (Side::Minus, &pair.minus)] {
            let tag = if side == Side::Plus { "plus" } else { "minus" };
            let again = project(part, side)?.distance(part, nf)?;
            let other = project(part, side.opposite())?.norm() / nf;
            checks.push(Check::below(format!("{}/idempotence_{tag}", f.label), again, tol.projection));
            checks.push(Check::below(format!("{}/orthogonality_{tag}", f.label), other, tol.projection));
            let pw = paley_wiener_residual(part, side);
            checks.push(Check::below(format!("{}/paley_wiener_{tag}", f.label), pw, tol.paley_wiener));
        }
        let conj = project(&sf.conj(), Side::Plus)?.distance(&pair.minus.conj(), nf)?;
        checks.push(Check::below(format!("{}/conjugation", f.label), conj, tol.projection));
        Ok(checks)
    })?;
    let mut rows: Vec<(String, Check)> = per_function.into_iter().flatten().map(|c| ("hardy".to_string(), c)).collect();

    // complex evaluation at 20 points spread over the nonzero entries
    let points: Vec<(usize, Complex64)> = (0..20)
        .map(|j| {
            let re = -3.0 + 0.3 * j as f64;
            let im = if j % 2 == 0 { 0.6 + 0.05 * j as f64 } else { -(0.5 + 0.07 * j as f64) };
            (1 + j % (CORPUS_SIZE - 1), Complex64::new(re, im))
        })
        .collect();
    let evals = Execution::default().try_map(&points, |&(i, y)| -> friedrichs::Result<Check> {
        let f = &fs[i];
        let sf = f.sample(grid)?;
        let side = if y.im > 0.0 { Side::Plus } else { Side::Minus };
        let ours = eval_complex(&sf, side, y)?;
        let direct = cauchy_quadrature(f, side, y, grid.scale())?;
        Ok(Check::below(format!("{}/eval_complex@{:.2}{:+.2}i", f.label, y.re, y.im), (ours - direct).norm(), tol.eval_complex))
    })?;
    rows.extend(evals.into_iter().map(|c| ("hardy".to_string(), c)));
    Ok(rows)
}

fn pole_name(p: PoleChoice) -> &'static str {
    match p {
        PoleChoice::Z => "z",
        PoleChoice::Zcc => "zcc",
    }
}

pub fn restriction_suite(cfg: &RunConfig) -> Result<Vec<(String, Check)>, HarnessError> {
    let tol = cfg.tolerances.restriction;
    let params = cfg.params()?;
    let grid = CayleyGrid::new(4096, 3.0)?;
    let mut jobs = Vec::new();
    for pole in [PoleChoice::Z, PoleChoice::Zcc] {
        for tag in Case::ALL {
            for t in [0.5, -0.7, 2.0] {
                jobs.push((pole, tag, t));
            }
        }
    }
    let results = Execution::default().try_map(&jobs, |&(pole, tag, t)| -> friedrichs::Result<Vec<Check>> {
        let f = default_test_function(grid, &params)?;
        let g = rational_test_function(grid, Side::Minus, 1.3, 2)?;
        let case = RestrictionCase::friedrichs(tag, pole, t, &params, grid, Some(f), Some(g))?;
        let r = t_suite(&case)?;
        let name = format!("{}/{}/t={t}", tag.name(), pole_name(pole));
        Ok(vec![
            Check::below(format!("{name}/completeness"), r.completeness, tol),
            Check::below(format!("{name}/orthogonality"), r.orthogonality, tol),
            Check::below(format!("{name}/idempotence"), r.idempotence, tol),
        ])
    })?;
    let mut rows: Vec<(String, Check)> = results.into_iter().flatten().map(|c| ("restriction".to_string(), c)).collect();

    // every constituent in the pole's class: the restricted double bracket
    // must equal the unrestricted one
    let fine = CayleyGrid::new(8192, 1.0)?;
    for (pole, side, t) in [(PoleChoice::Z, Side::Minus, 0.5), (PoleChoice::Zcc, Side::Plus, -0.5)] {
        let f = rational_test_function(fine, side, 1.0, 4)?;
        let g = rational_test_function(fine, side, 0.6, 5)?;
        let case = RestrictionCase::friedrichs(Case::DoubleBracket, pole, t, &params, fine, Some(f), Some(g))?;
        let r = collapse_residual(&case)?;
        rows.push((
            "restriction".to_string(),
            Check::below(format!("double_bracket/{}/collapse", pole_name(pole)), r, tol),
        ));
    }
    Ok(rows)
}

pub fn run_selftests(cfg: &RunConfig) -> Result<SelftestSummary, HarnessError> {
    let mut rows = hardy_suite(cfg)?;
    rows.extend(restriction_suite(cfg)?);
    Ok(SelftestSummary { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_seeded() {
        let a = corpus(7, 20);
        let b = corpus(7, 20);
        let c = corpus(8, 20);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_eq!(a.len(), 20);
        assert!(a[0].poles.is_empty() && a[0].bump.is_none());
        assert!(a[1..].iter().all(|f| !f.poles.is_empty()));
    }

    #[test]
    fn cauchy_quadrature_of_a_simple_pole() {
        // [1/(ω − i)]⁻ = 1/(ω − i), [·]⁺ = 0
        let f = CorpusFunction {
            label: "p".into(),
            poles: vec![PoleTerm {
                c: Complex64::new(1.0, 0.0),
                p: I,
                k: 1,
            }],
            bump: None,
        };
        let y = Complex64::new(0.3, -0.7);
        let minus = cauchy_quadrature(&f, Side::Minus, y, 2.0).unwrap();
        assert!((minus - 1.0 / (y - I)).norm() < 1e-10);
        let plus = cauchy_quadrature(&f, Side::Plus, Complex64::new(0.3, 0.7), 2.0).unwrap();
        assert!(plus.norm() < 1e-10);
    }
}
