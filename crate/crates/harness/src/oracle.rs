//! Independent pole computation for cross-checking the library root finder.
//!
//! Shares no code with `friedrichs::spectral`: fixed Gauss–Legendre panels
//! graded geometrically towards Re w, and Müller iteration.

use std::f64::consts::PI;

use friedrichs::Complex64;

/// Gauss–Legendre nodes and weights on [−1, 1] by Newton on P_n.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

fn v2(w: Complex64, m: f64) -> Complex64 {
    let d = 1.0 + (w / m) * (w / m);
    2.0 * w / (d * d)
}

/// Second-sheet η for the Friedrichs form factor, continuum cut at `omega_max`.
#[derive(Clone, Debug)]
pub struct OracleEta {
    pub omega1: f64,
    pub lambda: f64,
    pub cutoff_m: f64,
    pub omega_max: f64,
    rule: Vec<(f64, f64)>,
}

impl OracleEta {
    pub fn new(omega1: f64, lambda: f64, cutoff_m: f64, omega_max: f64) -> Self {
        OracleEta {
            omega1,
            lambda,
            cutoff_m,
            omega_max,
            rule: gauss_legendre(24),
        }
    }

    /// Panels refined geometrically around c with smallest width h.
    fn breakpoints(&self, c: f64, h: f64) -> Vec<f64> {
        let mut pts = vec![0.0, self.omega_max];
        let c = c.clamp(0.0, self.omega_max);
        pts.push(c);
        for dir in [-1.0, 1.0] {
            let mut d = h;
            loop {
                let p = c + dir * d;
                if p <= 0.0 || p >= self.omega_max {
                    break;
                }
                pts.push(p);
                d *= 1.25;
            }
        }
        // uniform cover of the far region as well
        let mut p = 0.5;
        while p < self.omega_max {
            pts.push(p);
            p += 0.5;
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        pts
    }

    pub fn eta(&self, w: Complex64) -> Complex64 {
        let l2 = self.lambda * self.lambda;
        let h = (w.im.abs() / 4.0).clamp(1e-6, 0.05);
        let pts = self.breakpoints(w.re, h);
        let mut integral = Complex64::new(0.0, 0.0);
        for p in pts.windows(2) {
            let (a, b) = (p[0], p[1]);
            let half = 0.5 * (b - a);
            let mid = 0.5 * (a + b);
            for &(x, wt) in &self.rule {
                let om = mid + half * x;
                integral += wt * half * v2(Complex64::new(om, 0.0), self.cutoff_m) / (w - om);
            }
        }
        w - self.omega1 - l2 * integral + Complex64::new(0.0, 2.0 * PI * l2) * v2(w, self.cutoff_m)
    }

    /// Müller root near ω₁ − iπλ²v(ω₁)².
    pub fn pole(&self) -> Complex64 {
        let g = v2(Complex64::new(self.omega1, 0.0), self.cutoff_m).re;
        let guess = Complex64::new(self.omega1, -PI * self.lambda * self.lambda * g);
        let d = (0.5 * guess.im.abs()).max(1e-4);
        muller(|w| self.eta(w), guess - d, guess + d, guess + Complex64::new(0.0, -d))
    }

    /// 1/η′(z) from a Richardson-extrapolated central difference.
    pub fn residue(&self, z: Complex64) -> Complex64 {
        let h = (0.1 * z.im.abs()).clamp(1e-5, 1e-3);
        let d = |h: f64| (self.eta(z + h) - self.eta(z - h)) / (2.0 * h);
        let deriv = (4.0 * d(h) - d(2.0 * h)) / 3.0;
        1.0 / deriv
    }
}

pub fn muller<F: Fn(Complex64) -> Complex64>(f: F, x0: Complex64, x1: Complex64, x2: Complex64) -> Complex64 {
    let mut x = [x0, x1, x2];
    let mut y = [f(x0), f(x1), f(x2)];
    for _ in 0..100 {
        let h1 = x[1] - x[0];
        let h2 = x[2] - x[1];
        let d1 = (y[1] - y[0]) / h1;
        let d2 = (y[2] - y[1]) / h2;
        let a = (d2 - d1) / (h2 + h1);
        let b = a * h2 + d2;
        let disc = (b * b - 4.0 * a * y[2]).sqrt();
        let den = if (b + disc).norm() > (b - disc).norm() { b + disc } else { b - disc };
        let xn = x[2] - 2.0 * y[2] / den;
        let done = (xn - x[2]).norm() < 1e-15 * xn.norm().max(1.0);
        x = [x[1], x[2], xn];
        y = [y[1], y[2], f(xn)];
        if done || y[2].norm() == 0.0 {
            break;
        }
    }
    x[2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let rule = gauss_legendre(24);
        let s: f64 = rule.iter().map(|(x, w)| w * x.powi(46)).sum();
        assert!((s - 2.0 / 47.0).abs() < 1e-14);
        let s: f64 = rule.iter().map(|(_, w)| w).sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn free_limit_pole_is_omega1() {
        let o = OracleEta::new(2.0, 0.0, 5.0, 60.0);
        assert_eq!(o.eta(Complex64::new(2.5, -0.1)), Complex64::new(0.5, -0.1));
    }
}
