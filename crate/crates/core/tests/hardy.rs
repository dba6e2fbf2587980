mod oracle;

use std::f64::consts::PI;

use friedrichs::hardy::*;
use friedrichs::Complex64;
use proptest::prelude::*;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn grid() -> CayleyGrid {
    CayleyGrid::new(2048, 2.0).unwrap()
}

/// c/(ω − p)^k; in H⁺ when Im p < 0 and in H⁻ when Im p > 0.
#[derive(Clone, Copy, Debug)]
struct Pole {
    c: Complex64,
    p: Complex64,
    k: i32,
}

impl Pole {
    fn at(&self, w: Complex64) -> Complex64 {
        self.c / (w - self.p).powi(self.k)
    }
}

#[derive(Clone, Debug)]
struct Mixture {
    poles: Vec<Pole>,
    // amplitude, centre, width of a Gaussian bump
    bump: Option<(f64, f64, f64)>,
}

impl Mixture {
    fn at(&self, w: f64) -> Complex64 {
        let z = Complex64::new(w, 0.0);
        let mut v: Complex64 = self.poles.iter().map(|p| p.at(z)).sum();
        if let Some((a, mu, s)) = self.bump {
            v += a * (-((w - mu) / s).powi(2)).exp();
        }
        v
    }

    fn sample(&self) -> SampledFunction {
        SampledFunction::from_fn(grid(), "mixture", |w| self.at(w)).unwrap()
    }

    /// Exact Hardy part for pole-only mixtures.
    fn part(&self, side: Side, w: Complex64) -> Complex64 {
        self.poles
            .iter()
            .filter(|p| match side {
                Side::Plus => p.p.im < 0.0,
                Side::Minus => p.p.im > 0.0,
            })
            .map(|p| p.at(w))
            .sum()
    }
}

fn pole_strategy() -> impl Strategy<Value = Pole> {
    (-1.0..1.0f64, -1.0..1.0f64, -4.0..4.0f64, 0.4..3.0f64, any::<bool>(), 1..3i32).prop_map(
        |(cr, ci, re, im, upper, k)| Pole {
            c: Complex64::new(cr, ci),
            p: Complex64::new(re, if upper { im } else { -im }),
            k,
        },
    )
}

fn mixture_strategy() -> impl Strategy<Value = Mixture> {
    (
        prop::collection::vec(pole_strategy(), 1..4),
        prop::option::of((-1.0..1.0f64, -3.0..3.0f64, 0.5..2.0f64)),
    )
        .prop_map(|(poles, bump)| Mixture { poles, bump })
}

fn pole_mixture_strategy() -> impl Strategy<Value = Mixture> {
    prop::collection::vec(pole_strategy(), 1..4).prop_map(|poles| Mixture { poles, bump: None })
}

/// (±1/2πi)∫f(ω)/(ω − y)dω by tanh-sinh in θ, ω = s·tan(θ/2).
fn cauchy_oracle(f: &Mixture, side: Side, y: Complex64, scale: f64) -> Complex64 {
    let integrand = |th: f64| {
        let x = (0.5 * th).tan();
        let w = scale * x;
        f.at(w) / (w - y) * (0.5 * scale * (1.0 + x * x))
    };
    let mut pts = vec![-PI, PI];
    for p in &f.poles {
        pts.push(2.0 * (p.p.re / scale).atan());
    }
    pts.push(2.0 * (y.re / scale).atan());
    pts.sort_by(f64::total_cmp);
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    let v = oracle::tanh_sinh_split(integrand, &pts, 1.0 / 512.0) / (2.0 * PI * I);
    match side {
        Side::Plus => v,
        Side::Minus => -v,
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 20, ..ProptestConfig::default() })]

    #[test]
    fn projection_laws(m in mixture_strategy()) {
        let f = m.sample();
        let nf = f.norm();
        let pair = decompose(&f).unwrap();
        prop_assert!(pair.recon_residual < 1e-8);
        for side in [Side::Plus, Side::Minus] {
            let p = if side == Side::Plus { &pair.plus } else { &pair.minus };
            let again = project(p, side).unwrap();
            prop_assert!(again.distance(p, nf).unwrap() < 1e-8);
            prop_assert!(project(p, side.opposite()).unwrap().norm() / nf < 1e-8);
        }
        // [f̄]⁺ = conj([f]⁻)
        let conj_plus = project(&f.conj(), Side::Plus).unwrap();
        prop_assert!(conj_plus.distance(&pair.minus.conj(), nf).unwrap() < 1e-8);
    }

    #[test]
    fn projection_is_linear(a in mixture_strategy(), b in mixture_strategy(), c in -2.0..2.0f64, d in -2.0..2.0f64) {
        let fa = a.sample();
        let fb = b.sample();
        let cc = Complex64::new(c, d);
        let combo = fa.scale(cc).add(&fb).unwrap();
        let lhs = project(&combo, Side::Plus).unwrap();
        let rhs = project(&fa, Side::Plus).unwrap().scale(cc).add(&project(&fb, Side::Plus).unwrap()).unwrap();
        prop_assert!(lhs.distance(&rhs, combo.norm()).unwrap() < 1e-10);
    }

    #[test]
    fn rational_parts_are_exact(m in pole_mixture_strategy()) {
        let f = m.sample();
        let plus = project(&f, Side::Plus).unwrap();
        let exact = SampledFunction::from_fn(grid(), "exact", |w| m.part(Side::Plus, Complex64::new(w, 0.0))).unwrap();
        prop_assert!(plus.distance(&exact, f.norm()).unwrap() < 1e-8);
        prop_assert!(paley_wiener_residual(&exact, Side::Plus) < 1e-6);
    }
}

#[test]
fn complex_evaluation_matches_quadrature_oracle() {
    let m = Mixture {
        poles: vec![
            Pole { c: Complex64::new(0.7, 0.2), p: Complex64::new(0.5, 0.8), k: 1 },
            Pole { c: Complex64::new(-0.3, 0.5), p: Complex64::new(-1.5, -1.2), k: 2 },
        ],
        bump: Some((0.8, 0.3, 1.1)),
    };
    let f = m.sample();
    let mut checked = 0;
    for j in 0..20 {
        let re = -3.0 + 0.3 * j as f64;
        let im = if j % 2 == 0 { 0.6 + 0.05 * j as f64 } else { -(0.5 + 0.07 * j as f64) };
        let y = Complex64::new(re, im);
        for side in [Side::Plus, Side::Minus] {
            let ours = eval_complex(&f, side, y).unwrap();
            let theirs = cauchy_oracle(&m, side, y, grid().scale());
            assert!((ours - theirs).norm() < 1e-6, "{y} {side:?}: {ours} vs {theirs}");
        }
        checked += 1;
    }
    assert_eq!(checked, 20);
}

#[test]
fn complex_evaluation_continues_rational_parts() {
    let m = Mixture {
        poles: vec![
            Pole { c: Complex64::new(1.0, 0.0), p: Complex64::new(0.0, 1.0), k: 1 },
            Pole { c: Complex64::new(0.0, 2.0), p: Complex64::new(1.0, -0.5), k: 2 },
        ],
        bump: None,
    };
    let f = m.sample();
    for y in [Complex64::new(0.3, 2.0), Complex64::new(-2.0, 0.7)] {
        assert!((eval_complex(&f, Side::Plus, y).unwrap() - m.part(Side::Plus, y)).norm() < 1e-10);
        // off-side evaluation returns minus the opposite part
        assert!((eval_complex(&f, Side::Minus, y).unwrap() + m.part(Side::Plus, y)).norm() < 1e-10);
    }
    let y = Complex64::new(0.2, -1.4);
    assert!((eval_complex(&f, Side::Minus, y).unwrap() - m.part(Side::Minus, y)).norm() < 1e-10);
}

#[test]
fn paley_wiener_detects_the_wrong_class() {
    let g = grid();
    let plus = SampledFunction::from_fn(g, "H+", |w| 1.0 / (w + I)).unwrap();
    let minus = SampledFunction::from_fn(g, "H-", |w| 1.0 / (w - I)).unwrap();
    assert!(paley_wiener_residual(&plus, Side::Plus) < 1e-20);
    assert!((paley_wiener_residual(&plus, Side::Minus) - 1.0).abs() < 1e-12);
    let both = plus.add(&minus).unwrap();
    assert!((paley_wiener_residual(&both, Side::Plus) - 0.5).abs() < 1e-12);
}

#[test]
fn zero_function_has_zero_residuals() {
    let z = SampledFunction::zeros(grid(), "0");
    let pair = decompose(&z).unwrap();
    assert_eq!(pair.recon_residual, 0.0);
    assert_eq!(pair.plus.max_abs(), 0.0);
    assert_eq!(paley_wiener_residual(&z, Side::Plus), 0.0);
}

#[test]
fn grid_mismatch_is_rejected() {
    let a = SampledFunction::zeros(CayleyGrid::new(64, 1.0).unwrap(), "a");
    let b = SampledFunction::zeros(CayleyGrid::new(64, 2.0).unwrap(), "b");
    assert!(a.add(&b).is_err());
}
