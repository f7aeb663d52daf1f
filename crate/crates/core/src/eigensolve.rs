//! Lowest eigenpairs of large sparse symmetric operators.
//!
//! The workhorse is a thick-restart Lanczos iteration with full
//! reorthogonalisation. It runs either on the operator itself or, for
//! badly separated spectra, on the shift-inverted operator `(A - σ)^{-1}`
//! with `σ` below the spectrum, applied through preconditioned conjugate
//! gradients. A cyclic Jacobi solver for small dense matrices serves as the
//! reference.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::{axpy, dot, norm, scale};

/// Relative spacing below which two eigenvalues are flagged as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

/// Symmetric linear operator on `ℝⁿ`.
pub trait SymmetricOperator: Sync {
    fn dim(&self) -> usize;

    /// `y = A x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// Upper bound for the spectral radius.
    fn norm_bound(&self) -> f64;
}

/// Approximate inverse used to precondition conjugate gradients.
pub trait Preconditioner: Sync {
    fn apply(&self, r: &[f64], z: &mut [f64]);
}

/// No preconditioning.
pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.copy_from_slice(r);
    }
}

/// Inverse diagonal of `A - σ`.
pub struct JacobiPreconditioner {
    inv_diag: Vec<f64>,
}

impl JacobiPreconditioner {
    pub fn new(diagonal: &[f64], shift: f64) -> Self {
        Self {
            inv_diag: diagonal.iter().map(|d| 1.0 / (d - shift)).collect(),
        }
    }
}

impl Preconditioner for JacobiPreconditioner {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        z.iter_mut()
            .zip(r)
            .zip(&self.inv_diag)
            .for_each(|((zi, ri), di)| *zi = ri * di);
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("invalid eigen request: {0}")]
    InvalidRequest(String),
    #[error("not converged after {iterations} iterations (residuals {residuals:?})")]
    NotConverged {
        iterations: usize,
        values: Vec<f64>,
        residuals: Vec<f64>,
    },
    #[error("inner linear solve failed to converge (relative residual {0:e})")]
    InnerSolve(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenRequest {
    /// Number of eigenpairs.
    pub k: usize,
    /// Bound on `‖Av - λv‖ / (‖v‖ ‖A‖)`.
    pub tol: f64,
    /// Cap on operator applications in the outer iteration.
    pub max_iterations: usize,
    pub seed: u64,
    /// Krylov basis size between restarts; `None` picks `max(2k + 20, 40)`.
    pub basis_size: Option<usize>,
}

impl EigenRequest {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            tol: 1e-10,
            max_iterations: 20_000,
            seed: 0x5eed,
            basis_size: None,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = n;
        self
    }

    pub fn with_basis_size(mut self, m: usize) -> Self {
        self.basis_size = Some(m);
        self
    }

    fn validate(&self, dim: usize) -> Result<(), EigenError> {
        if self.k == 0 {
            return Err(EigenError::InvalidRequest("k must be at least 1".into()));
        }
        if self.k > dim {
            return Err(EigenError::InvalidRequest(format!(
                "k = {} exceeds the dimension {dim}",
                self.k
            )));
        }
        if !(self.tol > 0.0) {
            return Err(EigenError::InvalidRequest("tol must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct EigenResult {
    /// Ascending.
    pub values: Vec<f64>,
    /// Orthonormal, one per value.
    pub vectors: Vec<Vec<f64>>,
    /// `‖Av - λv‖ / (‖v‖ ‖A‖)` recomputed with a fresh product.
    pub residuals: Vec<f64>,
    /// Outer operator applications.
    pub iterations: usize,
    /// Inner conjugate-gradient iterations (shift-invert only).
    pub inner_iterations: usize,
    /// Indices `i` with `values[i+1] - values[i]` below the degeneracy
    /// tolerance.
    pub degenerate: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Wanted {
    Smallest,
    Largest,
}

struct RitzPairs {
    vectors: Vec<Vec<f64>>,
    iterations: usize,
}

/// Thick-restart Lanczos for the `k` extreme eigenpairs of `op`.
fn lanczos<O: SymmetricOperator + ?Sized>(
    op: &O,
    k: usize,
    wanted: Wanted,
    ritz_tol: &dyn Fn(f64) -> f64,
    req: &EigenRequest,
) -> Result<RitzPairs, EigenError> {
    let n = op.dim();
    let m = req
        .basis_size
        .unwrap_or_else(|| (2 * k + 20).max(40))
        .clamp(k + 2, n.max(k + 2))
        .min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(req.seed);

    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    basis.push(random_unit(&mut rng, n, &[]));
    let mut t = vec![vec![0.0; m + 1]; m + 1];
    let mut kept = 0usize;
    let mut iterations = 0usize;
    let mut w = vec![0.0; n];

    loop {
        let mut beta_last = 0.0;
        let mut exhausted = false;
        let mut size = m;
        for j in kept..m {
            op.apply(&basis[j], &mut w);
            iterations += 1;
            let mut coef = vec![0.0; j + 1];
            for _ in 0..2 {
                for (i, v) in basis.iter().enumerate().take(j + 1) {
                    let c = dot(v, &w);
                    axpy(-c, v, &mut w);
                    coef[i] += c;
                }
            }
            for (i, &c) in coef.iter().enumerate() {
                t[i][j] = c;
                t[j][i] = c;
            }
            let beta = norm(&w);
            let scale_ref = coef[j].abs().max(t[j].iter().fold(0.0, |a: f64, v| a.max(v.abs())));
            if j + 1 == n {
                // the basis spans the whole space
                size = j + 1;
                exhausted = true;
                break;
            }
            if beta <= 1e-12 * scale_ref.max(f64::MIN_POSITIVE) {
                // invariant subspace: continue with a fresh orthogonal direction
                let fresh = random_unit(&mut rng, n, &basis);
                t[j + 1][j] = 0.0;
                t[j][j + 1] = 0.0;
                basis.push(fresh);
                beta_last = 0.0;
                continue;
            }
            let mut next = w.clone();
            scale(1.0 / beta, &mut next);
            t[j + 1][j] = beta;
            t[j][j + 1] = beta;
            basis.push(next);
            beta_last = beta;
        }

        let sub: Vec<Vec<f64>> = t[..size].iter().map(|r| r[..size].to_vec()).collect();
        let (theta, y) = dense_eig(&sub);
        let mut order: Vec<usize> = (0..size).collect();
        if wanted == Wanted::Largest {
            order.reverse();
        }
        let residual = |i: usize| {
            if exhausted {
                0.0
            } else {
                (beta_last * y[size - 1][i]).abs()
            }
        };
        let converged = order[..k]
            .iter()
            .all(|&i| residual(i) <= ritz_tol(theta[i]));
        if converged || exhausted {
            let vectors = order[..k]
                .iter()
                .map(|&i| combine(&basis[..size], &y, i))
                .collect();
            return Ok(RitzPairs {
                vectors,
                iterations,
            });
        }
        if iterations >= req.max_iterations {
            return Err(EigenError::NotConverged {
                iterations,
                values: order[..k].iter().map(|&i| theta[i]).collect(),
                residuals: order[..k].iter().map(|&i| residual(i)).collect(),
            });
        }
        // thick restart: keep the leading Ritz vectors plus the residual direction
        let keep = (k + (m - k) / 2).min(m - 2).max(k);
        let mut fresh: Vec<Vec<f64>> = order[..keep]
            .iter()
            .map(|&i| combine(&basis[..size], &y, i))
            .collect();
        let residual_vec = basis.pop().expect("basis holds m + 1 vectors");
        fresh.push(residual_vec);
        basis = fresh;
        for row in t.iter_mut() {
            row.iter_mut().for_each(|v| *v = 0.0);
        }
        for (slot, &i) in order[..keep].iter().enumerate() {
            t[slot][slot] = theta[i];
        }
        kept = keep;
    }
}

fn combine(basis: &[Vec<f64>], y: &[Vec<f64>], col: usize) -> Vec<f64> {
    let mut out = vec![0.0; basis[0].len()];
    for (l, v) in basis.iter().enumerate() {
        axpy(y[l][col], v, &mut out);
    }
    let nrm = norm(&out);
    scale(1.0 / nrm, &mut out);
    out
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize, against: &[Vec<f64>]) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    for _ in 0..2 {
        for b in against {
            let c = dot(b, &v);
            axpy(-c, b, &mut v);
        }
    }
    let nrm = norm(&v);
    scale(1.0 / nrm, &mut v);
    v
}

fn finish<O: SymmetricOperator + ?Sized>(
    a: &O,
    vectors: Vec<Vec<f64>>,
    iterations: usize,
    inner_iterations: usize,
) -> EigenResult {
    let anorm = a.norm_bound().max(f64::MIN_POSITIVE);
    let mut pairs: Vec<(f64, Vec<f64>, f64)> = vectors
        .into_iter()
        .map(|v| {
            let mut av = vec![0.0; v.len()];
            a.apply(&v, &mut av);
            let vv = dot(&v, &v);
            let lambda = dot(&v, &av) / vv;
            axpy(-lambda, &v, &mut av);
            (lambda, v, norm(&av) / (vv.sqrt() * anorm))
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let degenerate = values
        .windows(2)
        .enumerate()
        .filter(|(_, w)| (w[1] - w[0]).abs() <= DEGENERACY_TOL * anorm.max(1.0))
        .map(|(i, _)| i)
        .collect();
    let residuals = pairs.iter().map(|p| p.2).collect();
    let vectors = pairs.into_iter().map(|p| p.1).collect();
    EigenResult {
        values,
        vectors,
        residuals,
        iterations,
        inner_iterations,
        degenerate,
    }
}

fn check_residuals(result: EigenResult, tol: f64) -> Result<EigenResult, EigenError> {
    if result.residuals.iter().all(|&r| r <= tol) {
        Ok(result)
    } else {
        Err(EigenError::NotConverged {
            iterations: result.iterations,
            values: result.values,
            residuals: result.residuals,
        })
    }
}

/// The `k` smallest eigenpairs of `a` by Lanczos on `a` itself.
pub fn lowest_eigenpairs<O: SymmetricOperator + ?Sized>(
    a: &O,
    req: &EigenRequest,
) -> Result<EigenResult, EigenError> {
    req.validate(a.dim())?;
    let anorm = a.norm_bound().max(f64::MIN_POSITIVE);
    let tol = 0.5 * req.tol * anorm;
    let ritz = lanczos(a, req.k, Wanted::Smallest, &|_| tol, req)?;
    check_residuals(finish(a, ritz.vectors, ritz.iterations, 0), req.tol)
}

/// `(A - σ)^{-1}` applied by preconditioned conjugate gradients.
struct ShiftInvert<'a, O: ?Sized, P: ?Sized> {
    a: &'a O,
    shift: f64,
    precond: &'a P,
    tol: f64,
    max_iterations: usize,
    inner: AtomicUsize,
    failed: AtomicBool,
    worst: std::sync::Mutex<f64>,
}

impl<O: SymmetricOperator + ?Sized, P: Preconditioner + ?Sized> SymmetricOperator
    for ShiftInvert<'_, O, P>
{
    fn dim(&self) -> usize {
        self.a.dim()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        let out = conjugate_gradient(
            self.a,
            self.shift,
            self.precond,
            x,
            y,
            self.tol,
            self.max_iterations,
        );
        self.inner.fetch_add(out.iterations, Ordering::Relaxed);
        if !out.converged {
            self.failed.store(true, Ordering::Relaxed);
            let mut w = self.worst.lock().unwrap();
            *w = w.max(out.relative_residual);
        }
    }

    fn norm_bound(&self) -> f64 {
        1.0
    }
}

/// The `k` smallest eigenpairs of `a` by Lanczos on `(a - shift)^{-1}`.
///
/// `shift` must lie strictly below the spectrum so that the inner systems
/// are positive definite; `precond` approximates `(a - shift)^{-1}`.
pub fn lowest_eigenpairs_shift_invert<O, P>(
    a: &O,
    shift: f64,
    precond: &P,
    req: &EigenRequest,
) -> Result<EigenResult, EigenError>
where
    O: SymmetricOperator + ?Sized,
    P: Preconditioner + ?Sized,
{
    req.validate(a.dim())?;
    let op = ShiftInvert {
        a,
        shift,
        precond,
        tol: (1e-3 * req.tol).clamp(1e-14, 1e-10),
        max_iterations: 5_000,
        inner: AtomicUsize::new(0),
        failed: AtomicBool::new(false),
        worst: std::sync::Mutex::new(0.0),
    };
    let anorm = a.norm_bound().max(f64::MIN_POSITIVE);
    // ‖(A-σ)v - v/μ‖ ≲ ‖A-σ‖ r / μ, so scale the Ritz tolerance by μ
    let dist = anorm + shift.abs();
    let tol = req.tol;
    let ritz_tol = move |mu: f64| 0.25 * tol * anorm * mu.abs() / dist;
    let ritz = lanczos(&op, req.k, Wanted::Largest, &ritz_tol, req)?;
    if op.failed.load(Ordering::Relaxed) {
        return Err(EigenError::InnerSolve(*op.worst.lock().unwrap()));
    }
    let inner = op.inner.load(Ordering::Relaxed);
    check_residuals(finish(a, ritz.vectors, ritz.iterations, inner), req.tol)
}

#[derive(Debug, Clone, Copy)]
pub struct CgOutcome {
    pub iterations: usize,
    pub relative_residual: f64,
    pub converged: bool,
}

/// Preconditioned conjugate gradients for `(A - shift) x = b`, starting from
/// the contents of `x`.
pub fn conjugate_gradient<O, P>(
    a: &O,
    shift: f64,
    precond: &P,
    b: &[f64],
    x: &mut [f64],
    tol: f64,
    max_iterations: usize,
) -> CgOutcome
where
    O: SymmetricOperator + ?Sized,
    P: Preconditioner + ?Sized,
{
    let n = b.len();
    let bnorm = norm(b);
    if bnorm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return CgOutcome {
            iterations: 0,
            relative_residual: 0.0,
            converged: true,
        };
    }
    let mut r = vec![0.0; n];
    a.apply(x, &mut r);
    r.iter_mut()
        .zip(b)
        .zip(x.iter())
        .for_each(|((ri, bi), xi)| *ri = bi - (*ri - shift * xi));
    let mut z = vec![0.0; n];
    precond.apply(&r, &mut z);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut q = vec![0.0; n];
    let mut rel = norm(&r) / bnorm;
    let mut it = 0;
    while rel > tol && it < max_iterations {
        a.apply(&p, &mut q);
        axpy(-shift, &p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            break;
        }
        let alpha = rz / pq;
        axpy(alpha, &p, x);
        axpy(-alpha, &q, &mut r);
        rel = norm(&r) / bnorm;
        it += 1;
        if rel <= tol {
            break;
        }
        precond.apply(&r, &mut z);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.iter_mut().zip(&z).for_each(|(pi, zi)| *pi = zi + beta * *pi);
    }
    CgOutcome {
        iterations: it,
        relative_residual: rel,
        converged: rel <= tol,
    }
}

/// Full eigendecomposition of a small dense symmetric matrix by cyclic
/// Jacobi rotations. Returns ascending eigenvalues and the matrix whose
/// columns are the matching orthonormal eigenvectors.
pub fn dense_eig(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.to_vec();
    let mut v = vec![vec![0.0; n]; n];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let frob = m
        .iter()
        .flat_map(|r| r.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    let off = |m: &[Vec<f64>]| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[i][j] * m[i][j];
                }
            }
        }
        s.sqrt()
    };
    for _sweep in 0..100 {
        if off(&m) <= 1e-14 * frob {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p][q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let tau = (m[q][q] - m[p][p]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[k][p];
                    let mkq = m[k][q];
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[p][k];
                    let mqk = m[q][k];
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i][i].total_cmp(&m[j][j]));
    let values = order.iter().map(|&i| m[i][i]).collect();
    let vectors = (0..n)
        .map(|r| order.iter().map(|&c| v[r][c]).collect())
        .collect();
    (values, vectors)
}

/// Dense symmetric matrix wrapper, mostly for tests and small problems.
pub struct DenseSym {
    rows: Vec<Vec<f64>>,
}

impl DenseSym {
    pub fn new(rows: Vec<Vec<f64>>) -> Self {
        Self { rows }
    }
}

impl SymmetricOperator for DenseSym {
    fn dim(&self) -> usize {
        self.rows.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (yi, row) in y.iter_mut().zip(&self.rows) {
            *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    fn norm_bound(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sparse::SparseSymMatrix;
    use std::f64::consts::PI;

    fn laplacian_1d(n: usize) -> SparseSymMatrix {
        let mut trip = Vec::new();
        for i in 0..n {
            trip.push((i, i, 2.0));
            if i + 1 < n {
                trip.push((i, i + 1, -1.0));
            }
        }
        SparseSymMatrix::from_upper_triplets(n, &trip).unwrap()
    }

    #[test]
    fn dense_eig_small_cases() {
        let (vals, _) = dense_eig(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        let id: Vec<Vec<f64>> = (0..5)
            .map(|i| (0..5).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        assert!(dense_eig(&id).0.iter().all(|&v| v == 1.0));
        let lap = laplacian_1d(10).to_dense();
        let (vals, vecs) = dense_eig(&lap);
        for (k, v) in vals.iter().enumerate() {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / 11.0).cos();
            assert!((v - exact).abs() < 1e-13);
        }
        // orthonormal columns
        for a in 0..10 {
            for b in 0..10 {
                let g: f64 = (0..10).map(|r| vecs[r][a] * vecs[r][b]).sum();
                assert!((g - if a == b { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn diagonal_matrix() {
        let a = SparseSymMatrix::from_upper_triplets(
            4,
            &[(0, 0, 1.0), (1, 1, 2.0), (2, 2, 3.0), (3, 3, 4.0)],
        )
        .unwrap();
        let r = lowest_eigenpairs(&a, &EigenRequest::new(2)).unwrap();
        assert!((r.values[0] - 1.0).abs() < 1e-12);
        assert!((r.values[1] - 2.0).abs() < 1e-12);
        assert!((r.vectors[0][0].abs() - 1.0).abs() < 1e-10);
        assert!((r.vectors[1][1].abs() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn laplacian_1d_closed_form() {
        let a = laplacian_1d(100);
        let r = lowest_eigenpairs(&a, &EigenRequest::new(3)).unwrap();
        for k in 0..3 {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / 101.0).cos();
            assert!((r.values[k] - exact).abs() < 1e-10, "{} vs {}", r.values[k], exact);
        }
    }

    #[test]
    fn shift_invert_matches_plain() {
        let a = laplacian_1d(400);
        let req = EigenRequest::new(4).with_tol(1e-11);
        let plain = lowest_eigenpairs(&a, &req).unwrap();
        let pre = JacobiPreconditioner::new(&a.diagonal(), -0.5);
        let si = lowest_eigenpairs_shift_invert(&a, -0.5, &pre, &req).unwrap();
        for k in 0..4 {
            assert!((plain.values[k] - si.values[k]).abs() < 1e-12);
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * PI / 401.0).cos();
            assert!((si.values[k] - exact).abs() < 1e-12);
        }
        assert!(si.inner_iterations > 0);
        assert!(si.iterations < plain.iterations);
    }

    #[test]
    fn conjugate_gradient_solves_spd_system() {
        let a = laplacian_1d(50);
        let b: Vec<f64> = (0..50).map(|i| (i as f64).sin()).collect();
        let mut x = vec![0.0; 50];
        let out = conjugate_gradient(&a, -1.0, &IdentityPreconditioner, &b, &mut x, 1e-13, 500);
        assert!(out.converged);
        let mut y = vec![0.0; 50];
        a.apply(&x, &mut y);
        for i in 0..50 {
            assert!((y[i] + x[i] - b[i]).abs() < 1e-11);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let a = laplacian_1d(300);
        let req = EigenRequest::new(2).with_seed(7);
        let r1 = lowest_eigenpairs(&a, &req).unwrap();
        let r2 = lowest_eigenpairs(&a, &req).unwrap();
        assert_eq!(r1.values, r2.values);
        assert_eq!(r1.vectors, r2.vectors);
    }

    #[test]
    fn rejects_bad_requests() {
        let a = laplacian_1d(5);
        assert!(lowest_eigenpairs(&a, &EigenRequest::new(0)).is_err());
        assert!(lowest_eigenpairs(&a, &EigenRequest::new(6)).is_err());
        assert!(lowest_eigenpairs(&a, &EigenRequest::new(1).with_tol(0.0)).is_err());
    }

    #[test]
    fn reports_not_converged() {
        let a = laplacian_1d(2000);
        let req = EigenRequest::new(1)
            .with_tol(1e-14)
            .with_max_iterations(30)
            .with_basis_size(20);
        match lowest_eigenpairs(&a, &req) {
            Err(EigenError::NotConverged { values, residuals, .. }) => {
                assert_eq!(values.len(), 1);
                assert_eq!(residuals.len(), 1);
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }
}
