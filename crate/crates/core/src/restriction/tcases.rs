//! T± restriction of the four bracket structures on a frequency grid.
//!
//! For the pole z the restriction side is p = − and inner brackets carry
//! q = +; for z^{c.c} the roles are mirrored. Results are kept symbolic as
//! signed sums of [`Expr`] so that the operators can be applied again and
//! each term still knows its Hardy class.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hardy::{project, CayleyGrid, SampledFunction, Side};
use crate::model::ModelParams;
use crate::theta;

/// The four structures that occur in pole contributions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Case {
    /// e
    E,
    /// e·[ΘB f]^q
    EBracketF,
    /// e·[ΘB^c g]^q
    EBracketG,
    /// [ΘB f]^q·e·[ΘB^c g]^q
    DoubleBracket,
}

impl Case {
    pub const ALL: [Case; 4] = [Case::E, Case::EBracketF, Case::EBracketG, Case::DoubleBracket];

    pub fn name(self) -> &'static str {
        match self {
            Case::E => "e",
            Case::EBracketF => "e[Bf]",
            Case::EBracketG => "e[Bcg]",
            Case::DoubleBracket => "[Bf]e[Bcg]",
        }
    }
}

/// Which member of the conjugate pole pair the structure belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PoleChoice {
    /// z, restricted by T⁻.
    Z,
    /// z^{c.c}, restricted by T⁺.
    Zcc,
}

impl PoleChoice {
    /// Side p of the restriction that keeps the pole term.
    pub fn side(self) -> Side {
        match self {
            PoleChoice::Z => Side::Minus,
            PoleChoice::Zcc => Side::Plus,
        }
    }
}

/// Θ(ω)B(ω), Θ(ω)B^c(ω) or their product.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SystemFactor {
    B,
    Bc,
    BBc,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    F,
    G,
    /// e^{−iωt} with both Hardy parts.
    EFull,
    /// [e]^s: Θ(t)e for s = −, Θ(−t)e for s = +.
    E(Side),
    Sys(SystemFactor, Box<Expr>),
    Bracket(Side, Box<Expr>),
    Product(Vec<Expr>),
}

fn sys(a: SystemFactor, x: Expr) -> Expr {
    Expr::Sys(a, Box::new(x))
}

fn br(s: Side, x: Expr) -> Expr {
    Expr::Bracket(s, Box::new(x))
}

fn prod(xs: Vec<Expr>) -> Expr {
    Expr::Product(xs)
}

impl Expr {
    /// Hardy class used by the restriction rules; system factors are transparent.
    pub fn hardy_class(&self) -> Option<Side> {
        match self {
            Expr::F | Expr::G | Expr::EFull => None,
            Expr::E(s) | Expr::Bracket(s, _) => Some(*s),
            Expr::Sys(_, x) => x.hardy_class(),
            Expr::Product(xs) => {
                let first = xs.first()?.hardy_class()?;
                xs.iter()
                    .all(|x| x.hardy_class() == Some(first))
                    .then_some(first)
            }
        }
    }

    /// True if the time factor appears anywhere outside a bracket.
    fn has_free_time_factor(&self) -> bool {
        match self {
            Expr::EFull | Expr::E(_) => true,
            Expr::F | Expr::G | Expr::Bracket(..) => false,
            Expr::Sys(_, x) => x.has_free_time_factor(),
            Expr::Product(xs) => xs.iter().any(Expr::has_free_time_factor),
        }
    }
}

/// Signed sum of expressions.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Restricted {
    pub terms: Vec<(f64, Expr)>,
}

impl Restricted {
    fn single(x: Expr) -> Self {
        Restricted { terms: vec![(1.0, x)] }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Applies T^side term by term.
    ///
    /// Terms of the matching class are kept. Terms of the other class vanish:
    /// those carrying the analytic time factor are dropped by the e± rules,
    /// pure grid functions are re-projected numerically so the vanishing is
    /// measured rather than assumed.
    pub fn restrict(&self, side: Side) -> Result<Restricted> {
        let mut out = Vec::new();
        for (c, x) in &self.terms {
            match x.hardy_class() {
                Some(s) if s == side => out.push((*c, x.clone())),
                Some(_) => {
                    if !x.has_free_time_factor() {
                        out.push((*c, reproject(x, side)));
                    }
                }
                None => {
                    return Err(Error::InvalidArgument(
                        "restriction of an unclassified term needs one of the four case formulas".into(),
                    ))
                }
            }
        }
        Ok(Restricted { terms: out })
    }
}

fn reproject(x: &Expr, side: Side) -> Expr {
    match x {
        Expr::Sys(a, inner) => sys(*a, reproject(inner, side)),
        other => br(side, other.clone()),
    }
}

/// Grid data for one restriction case.
#[derive(Clone, Debug)]
pub struct RestrictionCase {
    pub tag: Case,
    pub pole: PoleChoice,
    pub t: f64,
    pub f: Option<SampledFunction>,
    pub g: Option<SampledFunction>,
    pub system_b: SampledFunction,
    pub system_bc: SampledFunction,
}

impl RestrictionCase {
    /// Friedrichs system factors Θ(ω)λv(ω) for both B and B^c.
    pub fn friedrichs(
        tag: Case,
        pole: PoleChoice,
        t: f64,
        params: &ModelParams,
        grid: CayleyGrid,
        f: Option<SampledFunction>,
        g: Option<SampledFunction>,
    ) -> Result<Self> {
        let lam = params.lambda;
        let b = SampledFunction::from_fn(grid, "theta B", |w| {
            Complex64::new(if w > 0.0 { lam * params.v(w) } else { 0.0 }, 0.0)
        })?;
        let case = RestrictionCase {
            tag,
            pole,
            t,
            f,
            g,
            system_bc: b.clone().with_label("theta Bc"),
            system_b: b,
        };
        case.validate()?;
        Ok(case)
    }

    /// Arbitrary system factors Θ(ω)B(ω) and Θ(ω)B^c(ω), already sampled.
    #[allow(clippy::too_many_arguments)]
    pub fn with_system(
        tag: Case,
        pole: PoleChoice,
        t: f64,
        system_b: SampledFunction,
        system_bc: SampledFunction,
        f: Option<SampledFunction>,
        g: Option<SampledFunction>,
    ) -> Result<Self> {
        let case = RestrictionCase {
            tag,
            pole,
            t,
            f,
            g,
            system_b,
            system_bc,
        };
        case.validate()?;
        Ok(case)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.t.is_finite() {
            return Err(Error::NonFinite("time parameter".into()));
        }
        let needs_f = matches!(self.tag, Case::EBracketF | Case::DoubleBracket);
        let needs_g = matches!(self.tag, Case::EBracketG | Case::DoubleBracket);
        if needs_f && self.f.is_none() {
            return Err(Error::MissingConstituent("f"));
        }
        if needs_g && self.g.is_none() {
            return Err(Error::MissingConstituent("g"));
        }
        let grid = self.system_b.grid();
        if self.system_bc.grid() != grid {
            return Err(Error::GridMismatch);
        }
        for h in self.f.iter().chain(self.g.iter()) {
            if h.grid() != grid {
                return Err(Error::GridMismatch);
            }
        }
        Ok(())
    }

    /// The unrestricted structure F.
    pub fn unrestricted(&self) -> Restricted {
        let q = self.pole.side().opposite();
        let bf = br(q, sys(SystemFactor::B, Expr::F));
        let bcg = br(q, sys(SystemFactor::Bc, Expr::G));
        Restricted::single(match self.tag {
            Case::E => Expr::EFull,
            Case::EBracketF => prod(vec![Expr::EFull, bf]),
            Case::EBracketG => prod(vec![Expr::EFull, bcg]),
            Case::DoubleBracket => prod(vec![bf, Expr::EFull, bcg]),
        })
    }

    /// Evaluates a signed sum on the grid.
    pub fn evaluate(&self, r: &Restricted) -> Result<SampledFunction> {
        let grid = *self.system_b.grid();
        let mut acc = SampledFunction::zeros(grid, "restricted");
        for (c, x) in &r.terms {
            acc = acc.add(&self.eval_expr(x)?.scale(Complex64::new(*c, 0.0)))?;
        }
        Ok(acc)
    }

    fn eval_expr(&self, x: &Expr) -> Result<SampledFunction> {
        let grid = *self.system_b.grid();
        match x {
            Expr::F => self.f.clone().ok_or(Error::MissingConstituent("f")),
            Expr::G => self.g.clone().ok_or(Error::MissingConstituent("g")),
            Expr::EFull => time_factor(grid, self.t, None),
            Expr::E(s) => time_factor(grid, self.t, Some(*s)),
            Expr::Sys(a, inner) => {
                let v = self.eval_expr(inner)?;
                match a {
                    SystemFactor::B => v.mul(&self.system_b),
                    SystemFactor::Bc => v.mul(&self.system_bc),
                    SystemFactor::BBc => v.mul(&self.system_b)?.mul(&self.system_bc),
                }
            }
            Expr::Bracket(s, inner) => {
                let value = match inner.as_ref() {
                    // a product whose factors all carry a class (only built by
                    // re-projection) is formed without aliasing between halves
                    Expr::Product(xs) if xs.len() > 1 && xs.iter().all(|x| x.hardy_class().is_some()) => {
                        let mut acc = self.eval_expr(&xs[0])?;
                        for x in &xs[1..] {
                            acc = acc.mul_dealiased(&self.eval_expr(x)?)?;
                        }
                        acc
                    }
                    other => self.eval_expr(other)?,
                };
                project(&value, *s)
            }
            Expr::Product(xs) => {
                                let (first, rest) = xs
                    .split_first()
                    .ok_or_else(|| Error::InvalidArgument("empty product".into()))?;
                let mut acc = self.eval_expr(first)?;
                for x in rest {
                    acc = acc.mul(&self.eval_expr(x)?)?;
                }
                Ok(acc)
            }
        }
    }
}

/// e^{−iωt}, optionally restricted by the analytic rules [e]⁻ = Θ(t)e, [e]⁺ = Θ(−t)e.
fn time_factor(grid: CayleyGrid, t: f64, side: Option<Side>) -> Result<SampledFunction> {
    let weight = match side {
        None => 1.0,
        Some(Side::Minus) => theta(t),
        Some(Side::Plus) => theta(-t),
    };
    SampledFunction::from_fn(grid, "e", |w| Complex64::from_polar(weight, -w * t))
}

/// (F)^{T^side} for the case structure.
pub fn t_restrict(case: &RestrictionCase, side: Side) -> Result<Restricted> {
    case.validate()?;
    let p = case.pole.side();
    let q = p.opposite();
    let on_pole_side = side == p;
    let ep = Expr::E(p);
    let eq = Expr::E(q);
    let f = Expr::F;
    let g = Expr::G;
    use SystemFactor::{BBc, Bc, B};
    let terms: Vec<(f64, Expr)> = match case.tag {
        Case::E => vec![(1.0, Expr::E(side))],
        Case::EBracketF | Case::EBracketG => {
            let (a, h) = if case.tag == Case::EBracketF { (B, f) } else { (Bc, g) };
            if on_pole_side {
                vec![
                    (1.0, sys(a, br(p, prod(vec![ep.clone(), h.clone()])))),
                    (-1.0, prod(vec![ep, br(p, sys(a, h))])),
                ]
            } else {
                vec![
                    (1.0, prod(vec![eq, br(q, sys(a, h.clone()))])),
                    (1.0, sys(a, br(q, prod(vec![ep, h])))),
                ]
            }
        }
        Case::DoubleBracket => {
            let fe = prod(vec![f.clone(), ep.clone()]);
            let eg = prod(vec![ep.clone(), g.clone()]);
            let feg = prod(vec![f.clone(), ep.clone(), g.clone()]);
            let bf = |s| br(s, sys(B, f.clone()));
            let bcg = |s| br(s, sys(Bc, g.clone()));
            let r = side;
            let head = if on_pole_side {
                prod(vec![bf(p), ep.clone(), bcg(p)])
            } else {
                prod(vec![bf(q), eq.clone(), bcg(q)])
            };
            let s_mid = if on_pole_side { -1.0 } else { 1.0 };
            vec![
                (1.0, sys(BBc, br(r, feg))),
                (-1.0, sys(BBc, br(r, prod(vec![br(q, fe.clone()), g.clone()])))),
                (s_mid, sys(B, prod(vec![br(r, fe), br(r, sys(Bc, g.clone()))]))),
                (-1.0, sys(BBc, br(r, prod(vec![f.clone(), br(q, eg.clone())])))),
                (s_mid, sys(Bc, prod(vec![br(r, sys(B, f.clone())), br(r, eg)]))),
                (1.0, head),
            ]
        }
    };
    Ok(Restricted { terms })
}

/// Residuals of one case at one pole.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TSuiteResult {
    pub case: Case,
    pub pole: PoleChoice,
    /// sup|F^{T−} + F^{T+} − F| / sup|F|.
    pub completeness: f64,
    /// sup|(F^{T^p})^{T^q}| / sup|F^{T^p}|.
    pub orthogonality: f64,
    /// sup|(F^{T^p})^{T^p} − F^{T^p}| / sup|F^{T^p}|.
    pub idempotence: f64,
}

fn rel_sup(a: &SampledFunction, reference: &SampledFunction) -> f64 {
    let num = a.max_abs();
    if num == 0.0 {
        0.0
    } else {
        num / reference.max_abs().max(f64::MIN_POSITIVE)
    }
}

pub fn t_suite(case: &RestrictionCase) -> Result<TSuiteResult> {
    let p = case.pole.side();
    let q = p.opposite();
    let full = case.evaluate(&case.unrestricted())?;
    let tp = t_restrict(case, p)?;
    let tq = t_restrict(case, q)?;
    let vp = case.evaluate(&tp)?;
    let vq = case.evaluate(&tq)?;
    let completeness = rel_sup(&vp.add(&vq)?.sub(&full)?, &full);
    let orthogonality = rel_sup(&case.evaluate(&tp.restrict(q)?)?, &vp);
    let idempotence = rel_sup(&case.evaluate(&tp.restrict(p)?)?.sub(&vp)?, &vp);
    Ok(TSuiteResult {
        case: case.tag,
        pole: case.pole,
        completeness,
        orthogonality,
        idempotence,
    })
}

/// When f, g and e are all of class p, the restricted double bracket must
/// reduce to e^p·[ΘBf]^q·[ΘB^c g]^q. Returns the relative sup deviation.
pub fn collapse_residual(case: &RestrictionCase) -> Result<f64> {
    if case.tag != Case::DoubleBracket {
        return Err(Error::InvalidArgument("collapse check applies to the double bracket".into()));
    }
    let p = case.pole.side();
    let q = p.opposite();
    let restricted = case.evaluate(&t_restrict(case, p)?)?;
    let reduced = case.evaluate(&Restricted::single(prod(vec![
        Expr::E(p),
        br(q, sys(SystemFactor::B, Expr::F)),
        br(q, sys(SystemFactor::Bc, Expr::G)),
    ])))?;
    Ok(rel_sup(&restricted.sub(&reduced)?, &reduced))
}

/// Default test function Θ(ω)v(ω)e^{−ω/4}.
pub fn default_test_function(grid: CayleyGrid, params: &ModelParams) -> Result<SampledFunction> {
    SampledFunction::from_fn(grid, "theta v exp(-w/4)", |w| {
        if w <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::new(params.v(w) * (-0.25 * w).exp(), 0.0)
    })
}

/// 1/(ω ∓ i·a)^k, of class H⁻ for the upper sign and H⁺ for the lower.
pub fn rational_test_function(grid: CayleyGrid, side: Side, a: f64, k: i32) -> Result<SampledFunction> {
    let pole = match side {
        Side::Minus => Complex64::new(0.0, a),
        Side::Plus => Complex64::new(0.0, -a),
    };
    let norm = (a / PI).sqrt();
    SampledFunction::from_fn(grid, format!("1/(w - {pole})^{k}"), |w| norm / (w - pole).powi(k))
}
