//! Finite-difference Hamiltonian `-Δ + V` on a box around the curve.
//!
//! The potential `V(Φ(s,t)) = W(t)` is sampled through the inverse Fermi map,
//! the 5-point Laplacian carries homogeneous Dirichlet conditions on the box,
//! and the lowest eigenvalues come from shift-inverted Lanczos with a
//! geometric multigrid preconditioner for the inner solves.

use rayon::prelude::*;
use thiserror::Error;

use crate::eigensolve::{
    lowest_eigenpairs_shift_invert, EigenError, EigenRequest, Preconditioner, SymmetricOperator,
};
use crate::geometry::{PlanePoint, WaveguideGeometry};
use crate::sparse::SparseSymMatrix;
use crate::transverse::{
    solve_double_well, solve_ground_state, Discretization1D, TransverseError, TransverseProfile,
};

#[derive(Debug, Error)]
pub enum HamiltonianError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("regularisation width {eps} is below two grid steps (h = {h})")]
    GridTooCoarse { eps: f64, h: f64 },
    #[error("profile support {support} exceeds the channel half-width {a}")]
    ProfileWiderThanChannel { support: f64, a: f64 },
    #[error("refinement disagreement {disagreement:e} exceeds tolerance {tol:e}")]
    NotConverged {
        disagreement: f64,
        tol: f64,
        report: Box<SpectralReport>,
    },
    #[error(transparent)]
    Transverse(#[from] TransverseError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
}

/// Interior nodes of a uniform grid on `[x_min, x_max] × [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
}

fn interval_count(lo: f64, hi: f64, h: f64) -> Result<usize, HamiltonianError> {
    let ratio = (hi - lo) / h;
    let m = ratio.round();
    if !(ratio.is_finite() && m >= 2.0 && (ratio - m).abs() <= 1e-9 * m) {
        return Err(HamiltonianError::InvalidGrid(format!(
            "extent {} is not an integer multiple (>= 2) of h = {h}",
            hi - lo
        )));
    }
    Ok(m as usize)
}

impl Grid2D {
    pub fn new(
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        h: f64,
    ) -> Result<Self, HamiltonianError> {
        if !(h > 0.0) {
            return Err(HamiltonianError::InvalidGrid("h must be positive".into()));
        }
        let nx = interval_count(x_min, x_max, h)? - 1;
        let ny = interval_count(y_min, y_max, h)? - 1;
        Ok(Self {
            x_min,
            x_max,
            y_min,
            y_max,
            h,
            nx,
            ny,
        })
    }

    /// Box containing the `a`-neighbourhood of the arc plus `padding` on all
    /// sides, centred on `x = 0` and widened outwards to whole multiples of
    /// `coarse_h`.
    pub fn around_arc(
        g: &WaveguideGeometry,
        padding: f64,
        coarse_h: f64,
        h: f64,
    ) -> Result<Self, HamiltonianError> {
        let half = 0.5 * g.theta();
        let reach = g.half_width() + padding;
        let snap = |v: f64| (v / coarse_h).ceil() * coarse_h;
        let x = snap(g.radius() * half.sin() + reach);
        let y_lo = -snap(reach);
        let y_hi = snap(g.radius() * (1.0 - half.cos()) + reach);
        Self::new(-x, x, y_lo, y_hi, h)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x_min + (i + 1) as f64 * self.h
    }

    pub fn y(&self, j: usize) -> f64 {
        self.y_min + (j + 1) as f64 * self.h
    }

    /// Row-major index, `x` fastest.
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn refined(&self) -> Self {
        Self {
            h: 0.5 * self.h,
            nx: 2 * self.nx + 1,
            ny: 2 * self.ny + 1,
            ..*self
        }
    }

    /// Same spacing on a different box.
    pub fn with_box(&self, x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self, HamiltonianError> {
        Self::new(x_min, x_max, y_min, y_max, self.h)
    }
}

/// How node values of `V` are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampling {
    /// `V` at the node itself.
    Point,
    /// Mean of `V` over `per_axis²` midpoints of the node's cell.
    CellAverage { per_axis: usize },
}

impl Sampling {
    /// Cell averaging with sub-samples about `width / 512` apart. Coarser
    /// sub-lattices resonate with straight edges crossing the grid at
    /// rational slopes and bias the effective well width along whole lines.
    pub fn adaptive(h: f64, width: f64) -> Self {
        let per_axis = (512.0 * h / width).ceil().clamp(1.0, 64.0) as usize;
        Self::CellAverage { per_axis }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplingOptions {
    /// `None` picks [`Sampling::adaptive`] for the profile width.
    pub sampling: Option<Sampling>,
    /// Half-width of the squeezed well replacing a delta profile; `None`
    /// means four grid steps.
    pub delta_eps: Option<f64>,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        Self {
            sampling: None,
            delta_eps: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PotentialField {
    pub values: Vec<f64>,
    /// Width of the squeezed well for delta profiles, 0 otherwise.
    pub regularization_eps: f64,
    pub sampling: Sampling,
}

impl PotentialField {
    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::min)
    }
}

/// Bounded profile actually put on the grid, and the regularisation width.
fn grid_profile(
    g: &WaveguideGeometry,
    profile: &TransverseProfile,
    h: f64,
    delta_eps: Option<f64>,
) -> Result<(TransverseProfile, f64), HamiltonianError> {
    if profile.is_delta() {
        let eps = delta_eps.unwrap_or(4.0 * h);
        if eps < 2.0 * h {
            return Err(HamiltonianError::GridTooCoarse { eps, h });
        }
        if !g.is_straight() && eps >= g.radius() {
            return Err(HamiltonianError::ProfileWiderThanChannel {
                support: eps,
                a: g.radius(),
            });
        }
        Ok((profile.regularized(eps)?, eps))
    } else {
        let support = profile.support_half_width();
        if support > g.half_width() * (1.0 + 1e-12) {
            return Err(HamiltonianError::ProfileWiderThanChannel {
                support,
                a: g.half_width(),
            });
        }
        Ok((profile.clone(), 0.0))
    }
}

pub fn sample_potential(
    g: &WaveguideGeometry,
    profile: &TransverseProfile,
    grid: &Grid2D,
) -> Result<PotentialField, HamiltonianError> {
    sample_potential_with(g, profile, grid, &SamplingOptions::default())
}

pub fn sample_potential_with(
    g: &WaveguideGeometry,
    profile: &TransverseProfile,
    grid: &Grid2D,
    options: &SamplingOptions,
) -> Result<PotentialField, HamiltonianError> {
    let (w, eps) = grid_profile(g, profile, grid.h, options.delta_eps)?;
    let reach = w.support_half_width();
    let sampling = options
        .sampling
        .unwrap_or_else(|| Sampling::adaptive(grid.h, 2.0 * reach));
    let h = grid.h;
    let value_at = |x: f64, y: f64| match g.inverse_fermi(PlanePoint::new(x, y)) {
        Some(c) if c.t.abs() < reach => w.value(c.t),
        _ => 0.0,
    };
    let mut values = vec![0.0; grid.len()];
    values
        .par_chunks_mut(grid.nx)
        .enumerate()
        .for_each(|(j, row)| {
            let y = grid.y(j);
            for (i, v) in row.iter_mut().enumerate() {
                let x = grid.x(i);
                *v = match sampling {
                    Sampling::Point => value_at(x, y),
                    Sampling::CellAverage { per_axis } => {
                        // the distance to the curve is 1-Lipschitz, so a cell whose
                        // centre is farther than reach + h never meets the support
                        match g.inverse_fermi(PlanePoint::new(x, y)) {
                            Some(c) if c.t.abs() > reach + h => 0.0,
                            None => 0.0,
                            _ => {
                                let k = per_axis;
                                let mut acc = 0.0;
                                for b in 0..k {
                                    let dy = ((b as f64 + 0.5) / k as f64 - 0.5) * h;
                                    for a in 0..k {
                                        let dx = ((a as f64 + 0.5) / k as f64 - 0.5) * h;
                                        acc += value_at(x + dx, y + dy);
                                    }
                                }
                                acc / (k * k) as f64
                            }
                        }
                    }
                };
            }
        });
    Ok(PotentialField {
        values,
        regularization_eps: eps,
        sampling,
    })
}

/// `y = (diag - 4/h²) x - (1/h²)(neighbour sum) + (4/h²) x`, i.e. the
/// 5-point operator with the given full diagonal, over rows in parallel.
fn stencil_apply(nx: usize, inv_h2: f64, diag: &[f64], x: &[f64], y: &mut [f64]) {
    let ny = diag.len() / nx;
    y.par_chunks_mut(nx).enumerate().for_each(|(j, row)| {
        let base = j * nx;
        for (i, yi) in row.iter_mut().enumerate() {
            let k = base + i;
            let mut nb = 0.0;
            if i > 0 {
                nb += x[k - 1];
            }
            if i + 1 < nx {
                nb += x[k + 1];
            }
            if j > 0 {
                nb += x[k - nx];
            }
            if j + 1 < ny {
                nb += x[k + nx];
            }
            *yi = diag[k] * x[k] - inv_h2 * nb;
        }
    });
}

/// Matrix-free form of the assembled Hamiltonian.
#[derive(Debug, Clone)]
pub struct StencilOperator {
    nx: usize,
    inv_h2: f64,
    diag: Vec<f64>,
}

impl StencilOperator {
    pub fn new(grid: &Grid2D, field: &PotentialField) -> Self {
        let inv_h2 = 1.0 / (grid.h * grid.h);
        Self {
            nx: grid.nx,
            inv_h2,
            diag: field.values.iter().map(|v| 4.0 * inv_h2 + v).collect(),
        }
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }
}

impl SymmetricOperator for StencilOperator {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        stencil_apply(self.nx, self.inv_h2, &self.diag, x, y);
    }

    fn norm_bound(&self) -> f64 {
        self.diag
            .iter()
            .map(|d| d.abs() + 4.0 * self.inv_h2)
            .fold(0.0, f64::max)
    }
}

/// Sparse 5-point Hamiltonian: `4/h² + V` on the diagonal, `-1/h²` to each
/// neighbour inside the box.
pub fn assemble(grid: &Grid2D, field: &PotentialField) -> SparseSymMatrix {
    let (nx, ny) = (grid.nx, grid.ny);
    let inv_h2 = 1.0 / (grid.h * grid.h);
    let n = grid.len();
    let mut offsets = Vec::with_capacity(n + 1);
    let mut cols = Vec::with_capacity(5 * n);
    let mut vals = Vec::with_capacity(5 * n);
    offsets.push(0);
    for j in 0..ny {
        for i in 0..nx {
            let k = grid.index(i, j);
            if j > 0 {
                cols.push(k - nx);
                vals.push(-inv_h2);
            }
            if i > 0 {
                cols.push(k - 1);
                vals.push(-inv_h2);
            }
            cols.push(k);
            vals.push(4.0 * inv_h2 + field.values[k]);
            if i + 1 < nx {
                cols.push(k + 1);
                vals.push(-inv_h2);
            }
            if j + 1 < ny {
                cols.push(k + nx);
                vals.push(-inv_h2);
            }
            offsets.push(cols.len());
        }
    }
    SparseSymMatrix::from_sorted_rows(n, offsets, cols, vals)
}

/// One level of the multigrid hierarchy for `A - σ`.
#[derive(Debug, Clone)]
struct Level {
    nx: usize,
    ny: usize,
    inv_h2: f64,
    diag: Vec<f64>,
}

impl Level {
    fn len(&self) -> usize {
        self.nx * self.ny
    }

    fn residual(&self, b: &[f64], x: &[f64], r: &mut [f64]) {
        stencil_apply(self.nx, self.inv_h2, &self.diag, x, r);
        r.par_iter_mut().zip(b).for_each(|(ri, bi)| *ri = bi - *ri);
    }

    fn jacobi(&self, b: &[f64], x: &mut [f64], r: &mut [f64], sweeps: usize) {
        for _ in 0..sweeps {
            self.residual(b, x, r);
            x.par_iter_mut()
                .zip(r.par_iter())
                .zip(self.diag.par_iter())
                .for_each(|((xi, ri), di)| *xi += JACOBI_WEIGHT * ri / di);
        }
    }

    fn coarsen(&self) -> Option<Level> {
        if self.nx % 2 == 0 || self.ny % 2 == 0 || self.nx < 7 || self.ny < 7 {
            return None;
        }
        let (cx, cy) = ((self.nx - 1) / 2, (self.ny - 1) / 2);
        let shifted: Vec<f64> = self
            .diag
            .iter()
            .map(|d| d - 4.0 * self.inv_h2)
            .collect();
        let mut coarse_shift = vec![0.0; cx * cy];
        restrict(self.nx, &shifted, cx, cy, &mut coarse_shift);
        let inv_h2 = 0.25 * self.inv_h2;
        Some(Level {
            nx: cx,
            ny: cy,
            inv_h2,
            diag: coarse_shift.iter().map(|v| 4.0 * inv_h2 + v).collect(),
        })
    }
}

const JACOBI_WEIGHT: f64 = 0.8;
const SMOOTHING_SWEEPS: usize = 2;
const DENSE_COARSE_LIMIT: usize = 1200;

/// Full weighting onto the coarse grid whose node `(I, J)` sits at fine node
/// `(2I+1, 2J+1)`.
fn restrict(fnx: usize, fine: &[f64], cx: usize, cy: usize, coarse: &mut [f64]) {
    coarse
        .par_chunks_mut(cx)
        .enumerate()
        .take(cy)
        .for_each(|(jc, row)| {
            let jf = 2 * jc + 1;
            for (ic, c) in row.iter_mut().enumerate() {
                let f = |di: isize, dj: isize| {
                    fine[(jf as isize + dj) as usize * fnx + (2 * ic as isize + 1 + di) as usize]
                };
                *c = (4.0 * f(0, 0)
                    + 2.0 * (f(-1, 0) + f(1, 0) + f(0, -1) + f(0, 1))
                    + f(-1, -1)
                    + f(1, -1)
                    + f(-1, 1)
                    + f(1, 1))
                    / 16.0;
            }
        });
}

/// Bilinear interpolation, added onto `fine`.
fn prolong_add(cx: usize, cy: usize, coarse: &[f64], fnx: usize, fine: &mut [f64]) {
    let get = |i: isize, j: isize| {
        if i < 0 || j < 0 || i >= cx as isize || j >= cy as isize {
            0.0
        } else {
            coarse[j as usize * cx + i as usize]
        }
    };
    fine.par_chunks_mut(fnx).enumerate().for_each(|(jf, row)| {
        // fine index 2I+1 ↔ coarse I; even fine indices lie between coarse nodes
        let (j0, j1, wj) = if jf % 2 == 1 {
            let j = (jf as isize - 1) / 2;
            (j, j, 1.0)
        } else {
            let j = jf as isize / 2;
            (j - 1, j, 0.5)
        };
        for (i_f, v) in row.iter_mut().enumerate() {
            let (i0, i1, wi) = if i_f % 2 == 1 {
                let i = (i_f as isize - 1) / 2;
                (i, i, 1.0)
            } else {
                let i = i_f as isize / 2;
                (i - 1, i, 0.5)
            };
            let sum = if j0 == j1 {
                if i0 == i1 {
                    get(i0, j0)
                } else {
                    get(i0, j0) + get(i1, j0)
                }
            } else if i0 == i1 {
                get(i0, j0) + get(i0, j1)
            } else {
                get(i0, j0) + get(i1, j0) + get(i0, j1) + get(i1, j1)
            };
            *v += wi * wj * sum;
        }
    });
}

/// Dense Cholesky factor of the coarsest operator.
#[derive(Debug, Clone)]
struct DenseCholesky {
    n: usize,
    l: Vec<f64>,
}

impl DenseCholesky {
    fn new(level: &Level) -> Option<Self> {
        let n = level.len();
        let mut a = vec![0.0; n * n];
        let e = vec![0.0; n];
        let mut col = vec![0.0; n];
        for k in 0..n {
            let mut unit = e.clone();
            unit[k] = 1.0;
            stencil_apply(level.nx, level.inv_h2, &level.diag, &unit, &mut col);
            for i in 0..n {
                a[i * n + k] = col[i];
            }
        }
        for j in 0..n {
            let mut d = a[j * n + j];
            for k in 0..j {
                d -= a[j * n + k] * a[j * n + k];
            }
            if !(d > 0.0) {
                return None;
            }
            let d = d.sqrt();
            a[j * n + j] = d;
            for i in j + 1..n {
                let mut s = a[i * n + j];
                for k in 0..j {
                    s -= a[i * n + k] * a[j * n + k];
                }
                a[i * n + j] = s / d;
            }
        }
        Some(Self { n, l: a })
    }

    fn solve(&self, b: &[f64], x: &mut [f64]) {
        let n = self.n;
        for i in 0..n {
            let mut s = b[i];
            for k in 0..i {
                s -= self.l[i * n + k] * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in i + 1..n {
                s -= self.l[k * n + i] * x[k];
            }
            x[i] = s / self.l[i * n + i];
        }
    }
}

/// Symmetric V-cycle for `A - σ` with damped Jacobi smoothing, full
/// weighting, bilinear interpolation and rediscretised coarse operators.
#[derive(Debug, Clone)]
pub struct Multigrid {
    levels: Vec<Level>,
    coarsest: Option<DenseCholesky>,
}

impl Multigrid {
    /// `σ` must lie below `min V` so that every level is positive definite.
    pub fn new(op: &StencilOperator, shift: f64) -> Self {
        let finest = Level {
            nx: op.nx,
            ny: op.diag.len() / op.nx,
            inv_h2: op.inv_h2,
            diag: op.diag.iter().map(|d| d - shift).collect(),
        };
        let mut levels = vec![finest];
        while let Some(next) = levels.last().unwrap().coarsen() {
            levels.push(next);
        }
        let last = levels.last().unwrap();
        let coarsest = if last.len() <= DENSE_COARSE_LIMIT {
            DenseCholesky::new(last)
        } else {
            None
        };
        Self { levels, coarsest }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    fn cycle(&self, l: usize, b: &[f64], x: &mut [f64]) {
        let level = &self.levels[l];
        x.iter_mut().for_each(|v| *v = 0.0);
        let mut r = vec![0.0; level.len()];
        if l + 1 == self.levels.len() {
            match &self.coarsest {
                Some(ch) => ch.solve(b, x),
                None => level.jacobi(b, x, &mut r, 40),
            }
            return;
        }
        level.jacobi(b, x, &mut r, SMOOTHING_SWEEPS);
        level.residual(b, x, &mut r);
        let coarse = &self.levels[l + 1];
        let mut rc = vec![0.0; coarse.len()];
        restrict(level.nx, &r, coarse.nx, coarse.ny, &mut rc);
        let mut ec = vec![0.0; coarse.len()];
        self.cycle(l + 1, &rc, &mut ec);
        prolong_add(coarse.nx, coarse.ny, &ec, level.nx, x);
        level.jacobi(b, x, &mut r, SMOOTHING_SWEEPS);
    }
}

impl Preconditioner for Multigrid {
    fn apply(&self, r: &[f64], z: &mut [f64]) {
        self.cycle(0, r, z);
    }
}

/// Bottom of the essential spectrum: `E₁` for `θ < π`, `E₁,R` for `θ = π`.
pub fn essential_threshold(
    g: &WaveguideGeometry,
    profile: &TransverseProfile,
    disc: &Discretization1D,
) -> Result<f64, HamiltonianError> {
    if g.theta() >= std::f64::consts::PI {
        Ok(solve_double_well(profile, g.radius(), disc.step())?.e1r)
    } else {
        Ok(solve_ground_state(profile, disc)?.e1)
    }
}

/// Eigen solve on a single grid.
#[derive(Debug, Clone)]
pub struct LevelResult {
    pub h: f64,
    pub dim: usize,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub inner_iterations: usize,
    pub shift: f64,
}

#[derive(Debug, Clone)]
pub struct GridSolution {
    pub level: LevelResult,
    pub vectors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub k: usize,
    /// Relative residual tolerance of each eigen solve.
    pub eig_tol: f64,
    pub seed: u64,
    pub basis_size: Option<usize>,
    pub sampling: SamplingOptions,
}

impl SolverOptions {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            eig_tol: 1e-10,
            seed: 0x5eed,
            basis_size: None,
            sampling: SamplingOptions::default(),
        }
    }
}

/// Lowest `k` eigenpairs of the grid Hamiltonian. The shift sits below
/// `min V`, which bounds the spectrum from below, so the inner systems are
/// positive definite.
pub fn solve_on_grid(
    g: &WaveguideGeometry,
    profile: &TransverseProfile,
    grid: &Grid2D,
    opts: &SolverOptions,
) -> Result<GridSolution, HamiltonianError> {
    let field = sample_potential_with(g, profile, grid, &opts.sampling)?;
    let op = StencilOperator::new(grid, &field);
    let vmin = field.min();
    let shift = vmin - 0.05 * vmin.abs().max(1.0);
    let mg = Multigrid::new(&op, shift);
    let mut req = EigenRequest::new(opts.k)
        .with_tol(opts.eig_tol)
        .with_seed(opts.seed);
    if let Some(m) = opts.basis_size {
        req = req.with_basis_size(m);
    }
    let res = lowest_eigenpairs_shift_invert(&op, shift, &mg, &req)?;
    Ok(GridSolution {
        level: LevelResult {
            h: grid.h,
            dim: grid.len(),
            eigenvalues: res.values,
            residuals: res.residuals,
            iterations: res.iterations,
            inner_iterations: res.inner_iterations,
            shift,
        },
        vectors: res.vectors,
    })
}

#[derive(Debug, Clone)]
pub struct SpectralReport {
    /// Extrapolated from the two finest levels, ascending.
    pub eigenvalues: Vec<f64>,
    pub threshold: f64,
    /// Eigenvalues with `λᵢ < threshold - 3·disagreementᵢ`.
    pub binding_count: usize,
    /// `threshold - λᵢ`.
    pub margins: Vec<f64>,
    /// `|λᵢ(h/2) - λᵢ(h)|` on the two finest levels.
    pub disagreement: Vec<f64>,
    /// Assumed convergence order in `h` used for the extrapolation.
    pub order: u32,
    pub levels: Vec<LevelResult>,
}

impl SpectralReport {
    fn from_levels(levels: Vec<LevelResult>, threshold: f64, order: u32) -> Self {
        let n = levels.len();
        let (coarse, fine) = (&levels[n - 2], &levels[n - 1]);
        let factor = f64::from(2u32.pow(order) - 1);
        let k = coarse.eigenvalues.len().min(fine.eigenvalues.len());
        let mut pairs: Vec<(f64, f64)> = (0..k)
            .map(|i| {
                let (c, f) = (coarse.eigenvalues[i], fine.eigenvalues[i]);
                (f + (f - c) / factor, (f - c).abs())
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let eigenvalues: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let disagreement: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let binding_count = pairs
            .iter()
            .filter(|(l, d)| *l < threshold - 3.0 * d)
            .count();
        Self {
            margins: eigenvalues.iter().map(|l| threshold - l).collect(),
            eigenvalues,
            threshold,
            binding_count,
            disagreement,
            order,
            levels,
        }
    }
}

/// Lowest eigenvalues on `levels` successively halved grids starting from
/// `grid`, extrapolated from the two finest, and compared with the
/// essential threshold. Fails with `NotConverged` when the finest pair
/// disagrees by more than `tol`.
pub fn discrete_spectrum(
    g: &WaveguideGeometry,
    profile: &TransverseProfile,
    grid: &Grid2D,
    levels: usize,
    tol: f64,
    opts: &SolverOptions,
) -> Result<SpectralReport, HamiltonianError> {
    if levels < 2 {
        return Err(HamiltonianError::InvalidGrid(
            "at least two refinement levels are needed".into(),
        ));
    }
    let disc = crate::transverse::default_discretization(profile, 1.0 / 64.0)?;
    let threshold = essential_threshold(g, profile, &disc)?;
    let mut results = Vec::with_capacity(levels);
    let mut current = *grid;
    for _ in 0..levels {
        results.push(solve_on_grid(g, profile, &current, opts)?.level);
        current = current.refined();
    }
    // the squeezed delta well converges at first order in its width
    let order = if profile.is_delta() { 1 } else { 2 };
    let report = SpectralReport::from_levels(results, threshold, order);
    let worst = report.disagreement.iter().copied().fold(0.0, f64::max);
    if worst > tol {
        return Err(HamiltonianError::NotConverged {
            disagreement: worst,
            tol,
            report: Box::new(report),
        });
    }
    Ok(report)
}
