//! Independent reference implementations used only by the tests.
#![allow(dead_code)]

use num_complex::Complex64;

/// Double-exponential (tanh-sinh) rule on [a, b] with step h.
pub fn tanh_sinh<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, h: f64) -> Complex64 {
    let half = 0.5 * (b - a);
    let mut sum = Complex64::new(0.0, 0.0);
    let kmax = (4.0 / h) as i64;
    for k in -kmax..=kmax {
        let t = k as f64 * h;
        let s = std::f64::consts::FRAC_PI_2 * t.sinh();
        let w = std::f64::consts::FRAC_PI_2 * t.cosh() / s.cosh().powi(2);
        if w * half < 1e-300 {
            continue;
        }
        // 1 - tanh|s| = 2/(e^{2|s|} + 1), kept accurate near the endpoints
        let gap = half * 2.0 / ((2.0 * s.abs()).exp() + 1.0);
        let xk = if s >= 0.0 { b - gap } else { a + gap };
        if xk <= a || xk >= b {
            continue;
        }
        sum += f(xk) * w;
    }
    sum * half * h
}

/// Composite tanh-sinh over consecutive breakpoints.
pub fn tanh_sinh_split<F: Fn(f64) -> Complex64>(f: F, points: &[f64], h: f64) -> Complex64 {
    points.windows(2).map(|p| tanh_sinh(&f, p[0], p[1], h)).sum()
}

pub fn v2(w: Complex64, m: f64) -> Complex64 {
    let d = 1.0 + (w / m) * (w / m);
    2.0 * w / (d * d)
}

/// Second-sheet η with the continuum truncated at omega_max, tanh-sinh based.
pub fn eta_second(w: Complex64, omega1: f64, lambda: f64, m: f64, omega_max: f64) -> Complex64 {
    let l2 = lambda * lambda;
    let mut pts = vec![0.0, omega_max];
    pts.extend([w.re - 0.5, w.re, w.re + 0.5].into_iter().filter(|&p| p > 0.0 && p < omega_max));
    pts.sort_by(f64::total_cmp);
    let integral = tanh_sinh_split(|x| v2(Complex64::new(x, 0.0), m) / (w - x), &pts, 1.0 / 128.0);
    w - omega1 - l2 * integral + Complex64::new(0.0, 2.0 * std::f64::consts::PI * l2) * v2(w, m)
}

/// Müller iteration for a scalar complex function.
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
        let done = (xn - x[2]).norm() < 1e-15;
        x = [x[1], x[2], xn];
        y = [y[1], y[2], f(xn)];
        if done || y[2].norm() == 0.0 {
            break;
        }
    }
    x[2]
}
