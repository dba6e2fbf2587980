//! Eigendecomposition of real symmetric arrowhead matrices.
//!
//! H = [[α, bᵀ], [b, diag(d)]] has eigenvalues at the zeros of the secular
//! function φ(μ) = μ − α − Σ b_i²/(μ − d_i), one in each gap between sorted
//! d's and one beyond each end. Every root is stored as an offset from the
//! nearer pole so that μ − d_i is available without cancellation, the border
//! is recomputed from the roots (Gu–Eisenstat) and the eigenvectors are
//! ∝ (1, ẑ_i/(μ − d_i)), which keeps them orthogonal to working precision.

use crate::error::{Error, Result};
use crate::model::HermitianMatrix;
use crate::parallel::Execution;

/// Full eigendecomposition, eigenvalues ascending, vectors stored column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralDecomposition {
    pub eigenvalues: Vec<f64>,
    vectors: Vec<f64>,
    dim: usize,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Eigenvector k as a slice of length dim.
    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k * self.dim..(k + 1) * self.dim]
    }

    /// V[i][k], component i of eigenvector k.
    pub fn component(&self, i: usize, k: usize) -> f64 {
        self.vectors[k * self.dim + i]
    }

    /// max_k ‖H v_k − μ_k v_k‖.
    pub fn max_residual(&self, h: &HermitianMatrix) -> f64 {
        (0..self.dim)
            .map(|k| {
                let v = self.vector(k);
                let mu = self.eigenvalues[k];
                let mut r: Vec<f64> = h.diagonal.iter().zip(v).map(|(d, x)| (d - mu) * x).collect();
                for (n, b) in h.border.iter().enumerate() {
                    r[0] += b * v[n + 1];
                    r[n + 1] += b * v[0];
                }
                r.iter().map(|x| x * x).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// max |VᵀV − I|.
    pub fn orthogonality_error(&self, exec: Execution) -> f64 {
        exec.map_range(self.dim, |a| {
            let va = self.vector(a);
            (a..self.dim)
                .map(|b| {
                    let dot: f64 = va.iter().zip(self.vector(b)).map(|(x, y)| x * y).sum();
                    (dot - if a == b { 1.0 } else { 0.0 }).abs()
                })
                .fold(0.0, f64::max)
        })
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// One coordinate direction (a unit combination of original field modes)
/// that still takes part in the secular equation.
#[derive(Clone, Debug)]
struct Active {
    d: f64,
    b: f64,
    members: Vec<(usize, f64)>,
}

/// Root of the secular equation written as origin + τ, origin a pole index.
#[derive(Clone, Copy, Debug)]
struct Root {
    origin: Option<usize>,
    tau: f64,
    value: f64,
}

pub fn diagonalize(h: &HermitianMatrix) -> Result<SpectralDecomposition> {
    diagonalize_with(h, Execution::default())
}

pub fn diagonalize_with(h: &HermitianMatrix, exec: Execution) -> Result<SpectralDecomposition> {
    let dim = h.dim();
    if h.border.len() + 1 != dim {
        return Err(Error::DimensionMismatch {
            expected: dim - 1,
            found: h.border.len(),
        });
    }
    let alpha = h.diagonal[0];
    let hnorm = h.norm().max(f64::MIN_POSITIVE);
    let tol = 8.0 * f64::EPSILON * hnorm;

    let mut order: Vec<usize> = (0..dim - 1).collect();
    order.sort_by(|&a, &b| h.diagonal[a + 1].total_cmp(&h.diagonal[b + 1]));

    // deflated eigenpairs: (eigenvalue, unit vector over original field modes)
    let mut deflated: Vec<(f64, Vec<(usize, f64)>)> = Vec::new();
    let mut active: Vec<Active> = Vec::new();
    for &n in &order {
        let d = h.diagonal[n + 1];
        let b = h.border[n];
        if b.abs() <= tol {
            deflated.push((d, vec![(n + 1, 1.0)]));
            continue;
        }
        if let Some(last) = active.last_mut() {
            if (d - last.d).abs() <= tol {
                // rotate the pair so that one border entry vanishes
                let r = last.b.hypot(b);
                let (c, s) = (last.b / r, b / r);
                let mut kept: Vec<(usize, f64)> = last.members.iter().map(|&(i, w)| (i, c * w)).collect();
                kept.push((n + 1, s));
                let mut dropped: Vec<(usize, f64)> = last.members.iter().map(|&(i, w)| (i, -s * w)).collect();
                dropped.push((n + 1, c));
                deflated.push((d, dropped));
                last.b = r;
                last.members = kept;
                continue;
            }
        }
        active.push(Active {
            d,
            b,
            members: vec![(n + 1, 1.0)],
        });
    }

    let m = active.len();
    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(dim);
    if m == 0 {
        let mut e0 = vec![0.0; dim];
        e0[0] = 1.0;
        pairs.push((alpha, e0));
    } else {
        let d: Vec<f64> = active.iter().map(|a| a.d).collect();
        let b2: Vec<f64> = active.iter().map(|a| a.b * a.b).collect();
        let bnorm = b2.iter().sum::<f64>().sqrt();
        let roots: Vec<Root> = exec.try_map(&(0..=m).collect::<Vec<_>>(), |&k| secular_root(alpha, &d, &b2, bnorm, k))?;

        // μ_k − d_i from the stored offsets
        let gap = |r: &Root, i: usize| -> f64 {
            match r.origin {
                Some(o) => (d[o] - d[i]) + r.tau,
                None => r.value - d[i],
            }
        };

        // ẑ_i² = −Π_k(d_i − μ_k)/Π_{j≠i}(d_i − d_j), accumulated in logs
        let zhat: Vec<f64> = exec.map_range(m, |i| {
            let mut log = 0.0;
            let mut sign = -1.0f64;
            for r in &roots {
                let g = -gap(r, i);
                log += g.abs().ln();
                sign *= g.signum();
            }
            for j in 0..m {
                if j != i {
                    let g = d[i] - d[j];
                    log -= g.abs().ln();
                    sign *= g.signum();
                }
            }
            let mag = (0.5 * log).exp();
            if sign < 0.0 {
                log::debug!("secular border {i} has negative square; using |.|");
            }
            mag * active[i].b.signum()
        });

        let vecs: Vec<(f64, Vec<f64>)> = exec.map(&roots, |r| {
            let comps: Vec<f64> = (0..m).map(|i| zhat[i] / gap(r, i)).collect();
            let norm = (1.0 + comps.iter().map(|c| c * c).sum::<f64>()).sqrt();
            let mut v = vec![0.0; dim];
            v[0] = 1.0 / norm;
            for (i, c) in comps.iter().enumerate() {
                for &(idx, w) in &active[i].members {
                    v[idx] += w * c / norm;
                }
            }
            (r.value, v)
        });
        pairs.extend(vecs);
    }
    for (mu, members) in deflated {
        let mut v = vec![0.0; dim];
        for (idx, w) in members {
            v[idx] = w;
        }
        pairs.push((mu, v));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut eigenvalues = Vec::with_capacity(dim);
    let mut vectors = Vec::with_capacity(dim * dim);
    for (mu, v) in pairs {
        if !mu.is_finite() || v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Eigen(format!("non-finite eigenpair (|H| = {hnorm:e})")));
        }
        eigenvalues.push(mu);
        vectors.extend(v);
    }
    Ok(SpectralDecomposition {
        eigenvalues,
        vectors,
        dim,
    })
}

/// Root k of φ: k = 0 lies below d_0, k = m above d_{m−1}, otherwise in (d_{k−1}, d_k).
fn secular_root(alpha: f64, d: &[f64], b2: &[f64], bnorm: f64, k: usize) -> Result<Root> {
    let m = d.len();
    // φ(origin + τ) with μ − d_i = (d_origin − d_i) + τ
    let phi = |origin: usize, tau: f64| -> (f64, f64, f64) {
        let mut s = 0.0;
        let mut ds = 0.0;
        let mut scale = 0.0;
        for i in 0..m {
            let g = (d[origin] - d[i]) + tau;
            let term = b2[i] / g;
            s += term;
            ds += term / g;
            scale += term.abs();
        }
        let mu = d[origin] + tau;
        (mu - alpha - s, 1.0 + ds, mu.abs() + alpha.abs() + scale)
    };
    let (origin, lo, hi) = if k == 0 {
        let lower = alpha.min(d[0]) - bnorm - 1.0;
        (0, lower - d[0], 0.0)
    } else if k == m {
        let upper = alpha.max(d[m - 1]) + bnorm + 1.0;
        (m - 1, 0.0, upper - d[m - 1])
    } else {
        let (left, right) = (k - 1, k);
        let half = 0.5 * (d[right] - d[left]);
        let (mid_val, _, _) = phi(left, half);
        if mid_val > 0.0 {
            // root in the left half, measure from d_left
            (left, 0.0, half)
        } else {
            (right, -half, 0.0)
        }
    };
    let (mut lo, mut hi) = (lo, hi);
    let mut tau = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (f, df, scale) = phi(origin, tau);
        if f == 0.0 || f.abs() <= 4.0 * f64::EPSILON * scale {
            break;
        }
        if f > 0.0 {
            hi = tau;
        } else {
            lo = tau;
        }
        let newton = tau - f / df;
        tau = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if hi - lo <= 2.0 * f64::EPSILON * (d[origin] + tau).abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    let value = d[origin] + tau;
    if !value.is_finite() {
        return Err(Error::Eigen(format!("secular root {k} did not converge")));
    }
    Ok(Root {
        origin: Some(origin),
        tau,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two() {
        let h = HermitianMatrix::new(vec![1.0, 3.0], vec![1.0]).unwrap();
        let sd = diagonalize(&h).unwrap();
        let s = 2f64.sqrt();
        assert!((sd.eigenvalues[0] - (2.0 - s)).abs() < 1e-15);
        assert!((sd.eigenvalues[1] - (2.0 + s)).abs() < 1e-15);
        assert!(sd.max_residual(&h) < 1e-15);
    }

    #[test]
    fn zero_border_deflates() {
        let h = HermitianMatrix::new(vec![2.0, 1.0, 3.0, 4.0], vec![0.0, 0.5, 0.0]).unwrap();
        let sd = diagonalize(&h).unwrap();
        assert!(sd.eigenvalues.contains(&1.0) && sd.eigenvalues.contains(&4.0));
        assert!(sd.max_residual(&h) < 1e-14);
        assert!(sd.orthogonality_error(Execution::Sequential) < 1e-14);
    }

    #[test]
    fn repeated_diagonal_is_rotated_out() {
        let h = HermitianMatrix::new(vec![0.0, 1.0, 1.0, 2.0], vec![0.3, 0.4, 0.1]).unwrap();
        let sd = diagonalize(&h).unwrap();
        assert_eq!(sd.eigenvalues.iter().filter(|&&x| x == 1.0).count(), 1);
        assert!(sd.max_residual(&h) < 1e-14);
        assert!(sd.orthogonality_error(Execution::Sequential) < 1e-14);
    }

    #[test]
    fn free_matrix() {
        let h = HermitianMatrix::new(vec![2.0, 0.5, 1.0], vec![0.0, 0.0]).unwrap();
        let sd = diagonalize(&h).unwrap();
        assert_eq!(sd.eigenvalues, vec![0.5, 1.0, 2.0]);
    }
}
