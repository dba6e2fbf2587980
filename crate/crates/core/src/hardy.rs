//! Hardy-class projections of square-integrable functions on the real line.
//!
//! Functions are sampled on a Cayley grid ω_j = s·tan(θ_j/2), with θ_j
//! uniform on (−π, π). Writing x = ω/s, the product (1 − ix)·f(ω) is a
//! periodic function of θ whose Fourier coefficients a_k expand f in
//!
//! ρ_k(ω) = (1 + ix)^k / (1 − ix)^(k+1),
//!
//! which lie in H²₊ for k ≥ 0 and in H²₋ for k < 0. Projection is therefore a
//! mask on the FFT of (1 − ix)·f, and the projected series can be summed at
//! any complex point of the matching half plane. The coefficient sequence is
//! the Laguerre-basis image of the Fourier transform, so the k < 0 / k ≥ 0
//! split is the half-line split of the Paley–Wiener theorem.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::parallel::Execution;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// H²₊ (analytic in the upper half plane) or H²₋ (lower half plane).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }

    /// True when `y` lies in the half plane where this class is analytic.
    pub fn contains(self, y: Complex64) -> bool {
        match self {
            Side::Plus => y.im > 0.0,
            Side::Minus => y.im < 0.0,
        }
    }

    fn keeps(self, k: i64) -> bool {
        match self {
            Side::Plus => k >= 0,
            Side::Minus => k < 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CayleyGrid {
    n: usize,
    scale: f64,
}

impl CayleyGrid {
    /// `n` must be even (so ω = 0 is never a node) and at least 4.
    pub fn new(n: usize, scale: f64) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("grid size must be even and >= 4, got {n}")));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidArgument(format!("grid scale must be positive, got {scale}")));
        }
        Ok(CayleyGrid { n, scale })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn step(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn theta(&self, j: usize) -> f64 {
        -PI + (j as f64 + 0.5) * self.step()
    }

    pub fn node(&self, j: usize) -> f64 {
        self.scale * (0.5 * self.theta(j)).tan()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Local node spacing dω/dθ·Δθ at frequency ω.
    pub fn spacing_at(&self, omega: f64) -> f64 {
        let x = omega / self.scale;
        0.5 * self.scale * (1.0 + x * x) * self.step()
    }

    /// Trapezoid weights in θ for ∫_ℝ dω; exact for the grid's function space.
    pub fn weights(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.spacing_at(self.node(j))).collect()
    }

    fn wavenumber(&self, m: usize) -> i64 {
        if m < self.n / 2 {
            m as i64
        } else {
            m as i64 - self.n as i64
        }
    }
}

/// Complex samples of a function on a [`CayleyGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct SampledFunction {
    grid: CayleyGrid,
    values: Vec<Complex64>,
    pub label: String,
}

impl SampledFunction {
    pub fn new(grid: CayleyGrid, values: Vec<Complex64>, label: impl Into<String>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        let label = label.into();
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::NonFinite(format!("sampled function '{label}'")));
        }
        Ok(SampledFunction { grid, values, label })
    }

    pub fn from_fn<F>(grid: CayleyGrid, label: impl Into<String>, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        let values = grid.nodes().into_iter().map(f).collect();
        SampledFunction::new(grid, values, label)
    }

    pub fn zeros(grid: CayleyGrid, label: impl Into<String>) -> Self {
        SampledFunction {
            grid,
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
            label: label.into(),
        }
    }

    pub fn grid(&self) -> &CayleyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn nodes(&self) -> Vec<f64> {
        self.grid.nodes()
    }

    fn same_grid(&self, other: &SampledFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    fn zip_with(&self, other: &SampledFunction, f: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        self.same_grid(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        SampledFunction::new(self.grid, values, format!("({}, {})", self.label, other.label))
    }

    pub fn add(&self, other: &SampledFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &SampledFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &SampledFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Product of two square-integrable functions that does not alias
    /// between the Hardy halves.
    ///
    /// With w = e^{iθ}, (1 − ix)·f₁f₂ = A(θ)B(θ)(1 + w)/2 where A and B are the
    /// ρ-series of the factors. That product spans wavenumbers −n .. n − 1 and
    /// is formed exactly on a θ grid of twice the size before truncating back,
    /// so two factors of one class give a result of that class to round-off,
    /// where [`mul`](Self::mul) folds the top coefficients onto the opposite
    /// half. Truncation makes this product non-associative, so it is reserved
    /// for same-class factors.
    pub fn mul_dealiased(&self, other: &SampledFunction) -> Result<Self> {
        self.same_grid(other)?;
        let n = self.grid.len();
        let fine = 2 * n;
        let hf = 2.0 * PI / fine as f64;
        let a = synthesize(&self.coefficients(), fine);
        let b = synthesize(&other.coefficients(), fine);
        let g: Vec<Complex64> = a
            .iter()
            .zip(&b)
            .enumerate()
            .map(|(j, (x, y))| x * y * 0.5 * (1.0 + Complex64::from_polar(1.0, -PI + (j as f64 + 0.5) * hf)))
            .collect();
        let half = (n / 2) as i64;
        let kept: Vec<(i64, Complex64)> = analyze(g).into_iter().filter(|(k, _)| -half <= *k && *k < half).collect();
        let values = synthesize(&kept, n)
            .into_iter()
            .enumerate()
            .map(|(j, v)| v / Complex64::new(1.0, -self.grid.node(j) / self.grid.scale))
            .collect();
        SampledFunction::new(self.grid, values, format!("({} * {})", self.label, other.label))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        SampledFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| v * c).collect(),
            label: self.label.clone(),
        }
    }

    pub fn conj(&self) -> Self {
        SampledFunction {
            grid: self.grid,
            values: self.values.iter().map(|v| v.conj()).collect(),
            label: format!("conj({})", self.label),
        }
    }

    /// Pointwise product with a function of ω.
    pub fn map<F: Fn(f64, Complex64) -> Complex64>(&self, f: F) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(j, &v)| f(self.grid.node(j), v))
            .collect();
        SampledFunction::new(self.grid, values, self.label.clone())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// L²(ℝ) norm from the grid quadrature.
    pub fn norm(&self) -> f64 {
        self.values
            .iter()
            .zip(self.grid.weights())
            .map(|(v, w)| v.norm_sqr() * w)
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// ‖self − other‖/‖reference‖ with the L² grid norm; 0 when both vanish.
    pub fn distance(&self, other: &SampledFunction, reference: f64) -> Result<f64> {
        let d = self.sub(other)?.norm();
        if d == 0.0 {
            return Ok(0.0);
        }
        Ok(d / reference.max(f64::MIN_POSITIVE))
    }

    /// Expansion coefficients a_k in FFT order (index m ↔ k = m or m − n).
    fn raw_spectrum(&self) -> Vec<Complex64> {
        let n = self.grid.len();
        let s = self.grid.scale;
        let mut buf: Vec<Complex64> = self
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| v * Complex64::new(1.0, -self.grid.node(j) / s))
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(n);
        fft.process(&mut buf);
        buf
    }

    /// Basis coefficients a_k for k = −n/2 .. n/2 − 1 in increasing k.
    pub fn coefficients(&self) -> Vec<(i64, Complex64)> {
        let s = self.grid.scale;
        let g = self
            .values
            .iter()
            .enumerate()
            .map(|(j, v)| v * Complex64::new(1.0, -self.grid.node(j) / s))
            .collect();
        analyze(g)
    }

    fn warn_if_unresolved_at_infinity(&self) {
        let n = self.grid.len();
        let s = self.grid.scale;
        let big = |j: usize| self.values[j] * Complex64::new(1.0, -self.grid.node(j) / s);
        let peak = (0..n).map(|j| big(j).norm()).fold(0.0, f64::max);
        // a 1/ω tail leaves an O(1/n) jump that the basis still represents
        // exactly, so this is only a hint
        if peak > 0.0 && (big(0) - big(n - 1)).norm() > 1e-6 * peak {
            log::debug!(
                "'{}' is not resolved at |w| -> infinity on this grid (jump {:.2e} of peak); widen the scale or refine",
                self.label,
                (big(0) - big(n - 1)).norm() / peak
            );
        }
    }

    /// Writes `omega,re,im` rows preceded by a grid header.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# cayley n={} scale={:e} label={}", self.grid.n, self.grid.scale, self.label)?;
        writeln!(out, "omega,re,im")?;
        for (j, v) in self.values.iter().enumerate() {
            writeln!(out, "{:.17e},{:.17e},{:.17e}", self.grid.node(j), v.re, v.im)?;
        }
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f))
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Io("empty file".into()))??;
        let mut n = None;
        let mut scale = None;
        let mut label = String::new();
        for tok in header.trim_start_matches('#').split_whitespace() {
            if let Some(v) = tok.strip_prefix("n=") {
                n = v.parse::<usize>().ok();
            } else if let Some(v) = tok.strip_prefix("scale=") {
                scale = v.parse::<f64>().ok();
            } else if let Some(v) = tok.strip_prefix("label=") {
                label = v.to_string();
            }
        }
        let (n, scale) = match (n, scale) {
            (Some(n), Some(s)) => (n, s),
            _ => return Err(Error::Io(format!("malformed grid header '{header}'"))),
        };
        let grid = CayleyGrid::new(n, scale)?;
        let mut values = Vec::with_capacity(n);
        for line in lines {
            let line = line?;
            if line.is_empty() || line.starts_with('#') || line.starts_with("omega") {
                continue;
            }
            let cols: Vec<f64> = line
                .split(',')
                .map(|c| c.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Io(format!("bad row '{line}': {e}")))?;
            if cols.len() != 3 {
                return Err(Error::Io(format!("expected 3 columns in '{line}'")));
            }
            let j = values.len();
            if j >= n {
                return Err(Error::DimensionMismatch { expected: n, found: j + 1 });
            }
            let node = grid.node(j);
            if (cols[0] - node).abs() > 1e-12 * node.abs().max(1.0) {
                return Err(Error::GridMismatch);
            }
            values.push(Complex64::new(cols[1], cols[2]));
        }
        SampledFunction::new(grid, values, label)
    }

    pub fn load_csv(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        SampledFunction::read_csv(std::io::BufReader::new(f))
    }
}

/// Fourier coefficients a_k of g(θ_j) = Σ a_k e^{ikθ_j} on the offset grid
/// θ_j = −π + (j + ½)2π/n, for k = −n/2 .. n/2 − 1 in increasing k.
fn analyze(mut g: Vec<Complex64>) -> Vec<(i64, Complex64)> {
    let n = g.len();
    let h = 2.0 * PI / n as f64;
    FftPlanner::new().plan_fft_forward(n).process(&mut g);
    let mut out: Vec<(i64, Complex64)> = g
        .iter()
        .enumerate()
        .map(|(m, x)| {
            let k = if m < n / 2 { m as i64 } else { m as i64 - n as i64 };
            (k, x * Complex64::from_polar(1.0, k as f64 * (PI - 0.5 * h)) / n as f64)
        })
        .collect();
    out.sort_by_key(|(k, _)| *k);
    out
}

/// Inverse of [`analyze`] on an n-point offset grid.
fn synthesize(coeffs: &[(i64, Complex64)], n: usize) -> Vec<Complex64> {
    let h = 2.0 * PI / n as f64;
    let mut spec = vec![Complex64::new(0.0, 0.0); n];
    for &(k, a) in coeffs {
        let m = k.rem_euclid(n as i64) as usize;
        spec[m] += a * Complex64::from_polar(1.0, k as f64 * (-PI + 0.5 * h));
    }
    FftPlanner::new().plan_fft_inverse(n).process(&mut spec);
    spec
}

/// [f]^side.
pub fn project(f: &SampledFunction, side: Side) -> Result<SampledFunction> {
    f.warn_if_unresolved_at_infinity();
    let grid = f.grid;
    let n = grid.len();
    let s = grid.scale;
    let mut spec = f.raw_spectrum();
    for (m, x) in spec.iter_mut().enumerate() {
        if !side.keeps(grid.wavenumber(m)) {
            *x = Complex64::new(0.0, 0.0);
        }
    }
    let ifft = FftPlanner::new().plan_fft_inverse(n);
    ifft.process(&mut spec);
    let values = spec
        .iter()
        .enumerate()
        .map(|(j, v)| v / (n as f64 * Complex64::new(1.0, -grid.node(j) / s)))
        .collect();
    let tag = match side {
        Side::Plus => "+",
        Side::Minus => "-",
    };
    SampledFunction::new(grid, values, format!("[{}]{tag}", f.label))
}

/// Projects many functions; the batch is spread over `exec`.
pub fn project_batch(fs: &[SampledFunction], side: Side, exec: Execution) -> Result<Vec<SampledFunction>> {
    exec.try_map(fs, |f| project(f, side))
}

#[derive(Clone, Debug, PartialEq)]
pub struct HardyPair {
    pub plus: SampledFunction,
    pub minus: SampledFunction,
    /// ‖plus + minus − f‖/‖f‖ (0 for the zero function).
    pub recon_residual: f64,
}

pub fn decompose(f: &SampledFunction) -> Result<HardyPair> {
    let plus = project(f, Side::Plus)?;
    let minus = project(f, Side::Minus)?;
    let recon_residual = plus.add(&minus)?.distance(f, f.norm())?;
    Ok(HardyPair {
        plus,
        minus,
        recon_residual,
    })
}

/// ±(1/2πi)∫ f(ω)/(ω − y) dω for the sign of `side`.
///
/// On the matching half plane this is the analytic continuation of
/// [f]^side; on the other half plane it is −[f]^opposite(y), which vanishes
/// when f is already of class `side`.
pub fn eval_complex(f: &SampledFunction, side: Side, y: Complex64) -> Result<Complex64> {
    if !(y.re.is_finite() && y.im.is_finite()) || y.im == 0.0 {
        return Err(Error::Domain(format!("complex evaluation needs Im y != 0, got {y}")));
    }
    let grid = f.grid;
    if y.im.abs() < 3.0 * grid.spacing_at(y.re) {
        log::warn!(
            "evaluation point {y} is within 3 grid spacings of the real axis; accuracy degrades"
        );
    }
    let target = if y.im > 0.0 { Side::Plus } else { Side::Minus };
    let coeffs = f.coefficients();
    let yy = y / grid.scale;
    let w = (1.0 + I * yy) / (1.0 - I * yy);
    let value = match target {
        Side::Plus => {
            // Σ_{k≥0} a_k w^k by Horner from the top
            coeffs
                .iter()
                .rev()
                .filter(|(k, _)| *k >= 0)
                .fold(Complex64::new(0.0, 0.0), |acc, (_, a)| acc * w + a)
        }
        Side::Minus => {
            // Σ_{m≥1} a_{−m} w^{−m}
            let winv = 1.0 / w;
            coeffs
                .iter()
                .filter(|(k, _)| *k < 0)
                .fold(Complex64::new(0.0, 0.0), |acc, (_, a)| (acc + a) * winv)
        }
    } / (1.0 - I * yy);
    Ok(if target == side { value } else { -value })
}

/// Fraction of ‖f‖² carried by the half-line forbidden for `side`.
pub fn paley_wiener_residual(f: &SampledFunction, side: Side) -> f64 {
    let mut total = 0.0;
    let mut forbidden = 0.0;
    for (k, a) in f.coefficients() {
        let e = a.norm_sqr();
        total += e;
        if !side.keeps(k) {
            forbidden += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        forbidden / total
    }
}

/// Human-readable summary row used by the self-test CLI.
pub fn describe(f: &SampledFunction) -> String {
    let mut s = String::new();
    let _ = write!(s, "{} (n={}, scale={}, |f|={:.3e})", f.label, f.grid.n, f.grid.scale, f.norm());
    s
}
