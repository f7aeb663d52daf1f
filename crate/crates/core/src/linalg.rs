//! Small dense/tridiagonal kernels and order-deterministic vector reductions.

use rayon::prelude::*;

/// Chunk length for parallel reductions. Partial sums are combined in chunk
/// order, so results do not depend on the number of worker threads.
const CHUNK: usize = 1 << 14;

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    if x.len() <= CHUNK {
        return x.iter().zip(y).map(|(a, b)| a * b).sum();
    }
    let partial: Vec<f64> = x
        .par_chunks(CHUNK)
        .zip(y.par_chunks(CHUNK))
        .map(|(a, b)| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    partial.iter().sum()
}

pub fn norm(x: &[f64]) -> f64 {
    dot(x, x).sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    if y.len() <= CHUNK {
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
        return;
    }
    y.par_chunks_mut(CHUNK)
        .zip(x.par_chunks(CHUNK))
        .for_each(|(yc, xc)| yc.iter_mut().zip(xc).for_each(|(yi, xi)| *yi += alpha * xi));
}

pub fn scale(alpha: f64, x: &mut [f64]) {
    if x.len() <= CHUNK {
        x.iter_mut().for_each(|v| *v *= alpha);
        return;
    }
    x.par_chunks_mut(CHUNK)
        .for_each(|c| c.iter_mut().for_each(|v| *v *= alpha));
}

/// Symmetric tridiagonal matrix with constant off-diagonal.
#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: f64,
}

impl SymTridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    #[cfg(test)]
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.off * x[i - 1];
            }
            if i + 1 < n {
                v += self.off * x[i + 1];
            }
            y[i] = v;
        }
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence count).
    pub fn count_below(&self, x: f64) -> usize {
        let e2 = self.off * self.off;
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            q = if i == 0 { d - x } else { d - x - e2 / q };
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    pub fn gershgorin(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().fold(f64::INFINITY, |m, &d| m.min(d)) - r;
        let hi = self.diag.iter().fold(f64::NEG_INFINITY, |m, &d| m.max(d)) + r;
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        assert!(k < self.len());
        let (mut lo, mut hi) = self.gershgorin();
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Eigenvector for an (accurate) eigenvalue by inverse iteration,
    /// normalised to unit Euclidean norm.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let mut x = vec![1.0; n];
        let scale = self
            .diag
            .iter()
            .fold(self.off.abs(), |m, d| m.max(d.abs()))
            .max(1.0);
        // shifting slightly off the eigenvalue keeps the pivots nonzero
        let shift = lambda - 1e3 * f64::EPSILON * scale;
        for _ in 0..4 {
            solve_shifted(self, shift, &mut x);
            let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= nrm);
        }
        x
    }
}

/// Solves `(T - shift I) x = b` in place with partial pivoting.
fn solve_shifted(t: &SymTridiagonal, shift: f64, b: &mut [f64]) {
    let n = t.len();
    if n == 1 {
        b[0] /= t.diag[0] - shift;
        return;
    }
    // rows hold (sub, diag, sup, sup2) after elimination
    let mut dl = vec![t.off; n - 1];
    let mut d: Vec<f64> = t.diag.iter().map(|v| v - shift).collect();
    let mut du = vec![t.off; n - 1];
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = f64::EPSILON;
            }
            let fact = dl[i] / d[i];
            d[i + 1] -= fact * du[i];
            b[i + 1] -= fact * b[i];
            dl[i] = 0.0;
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - fact * tmp;
            if i + 1 < n - 1 {
                du2[i] = du[i + 1];
                du[i + 1] = -fact * du2[i];
            }
            du[i] = tmp;
            b.swap(i, i + 1);
            b[i + 1] -= fact * b[i];
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = f64::EPSILON;
    }
    b[n - 1] /= d[n - 1];
    b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn laplacian(n: usize) -> SymTridiagonal {
        SymTridiagonal {
            diag: vec![2.0; n],
            off: -1.0,
        }
    }

    #[test]
    fn sturm_bisection_reproduces_laplacian_spectrum() {
        let t = laplacian(50);
        for k in 0..5 {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / 51.0).cos();
            assert!((t.eigenvalue(k) - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn inverse_iteration_gives_sine_mode() {
        let n = 40;
        let t = laplacian(n);
        let lam = t.eigenvalue(0);
        let v = t.eigenvector(lam);
        let norm: f64 = (0..n)
            .map(|i| ((i + 1) as f64 * PI / (n + 1) as f64).sin().powi(2))
            .sum::<f64>()
            .sqrt();
        let sign = v[0].signum();
        for (i, vi) in v.iter().enumerate() {
            let exact = ((i + 1) as f64 * PI / (n + 1) as f64).sin() / norm;
            assert!((sign * vi - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn pivoted_solve_matches_residual() {
        let t = SymTridiagonal {
            diag: vec![0.1, -3.0, 2.0, 0.0, 5.0, 1.0],
            off: 2.5,
        };
        let rhs = vec![1.0, -2.0, 0.5, 3.0, 1.0, -1.0];
        let mut x = rhs.clone();
        solve_shifted(&t, 0.7, &mut x);
        let mut y = vec![0.0; 6];
        t.apply(&x, &mut y);
        for i in 0..6 {
            assert!((y[i] - 0.7 * x[i] - rhs[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn chunked_dot_is_thread_count_independent() {
        let n = 100_003;
        let x: Vec<f64> = (0..n).map(|i| ((i as u64 * 7919) % 1000) as f64 * 1e-3).collect();
        let y: Vec<f64> = (0..n).map(|i| ((i as u64 * 104729) % 997) as f64 * 1e-2).collect();
        let a = dot(&x, &y);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| dot(&x, &y));
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
