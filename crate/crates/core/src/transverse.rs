//! One-dimensional cross-section operators.
//!
//! The transverse operator is `T = -d²/dt² + W(t)` with `W` supported in
//! `[-a, a]`; its lowest eigenvalue `E1 < 0` is the bottom of the essential
//! spectrum of the bent waveguide for `theta < pi`. The double-well operator
//! `T_R = -d²/dt² + W(t - R) + W(-t - R)` governs the `theta = pi` threshold.
//!
//! A delta profile `alpha δ(t)` is handled in closed form. Bounded profiles
//! are discretised by central differences on a uniform grid with Dirichlet
//! ends; the lowest eigenvalue comes from Sturm bisection, the vector from
//! inverse iteration, and two grid levels are combined by Richardson
//! extrapolation. The extrapolated value then seeds a shooting refinement on
//! `[-a, a]` with exact exponential matching, which yields an eigenfunction
//! accurate enough for the form quadratures downstream.

use thiserror::Error;

use crate::linalg::SymTridiagonal;
use crate::quadrature::GaussLegendre;

/// Eigenvalues above `-NO_BOUND_TOL` do not count as bound states.
pub const NO_BOUND_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransverseError {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("invalid discretisation: {0}")]
    InvalidDiscretization(String),
    #[error("no bound state: lowest eigenvalue {0} is not negative")]
    NoBoundState(f64),
    #[error("grid too coarse: halving the step moved E1 from {coarse} to {fine}")]
    DiscretizationTooCoarse { coarse: f64, fine: f64 },
    #[error("tail is not exponential: N estimates {first} and {second}")]
    TailNotExponential { first: f64, second: f64 },
    #[error("test function vanishes")]
    ZeroTestFunction,
    #[error("double-well distance {distance} must exceed the half-width {a}")]
    WellsOverlap { distance: f64, a: f64 },
}

/// Cross-section potential `W`.
#[derive(Debug, Clone, PartialEq)]
pub enum TransverseProfile {
    /// `alpha δ(t)` with `alpha < 0`.
    Delta { alpha: f64 },
    /// `-depth` on `(-half_width, half_width)`, zero outside.
    SquareWell { depth: f64, half_width: f64 },
    /// Piecewise-linear interpolation of `values` at `knots`, zero outside the
    /// knot range; the knots lie in `[-half_width, half_width]`.
    Tabulated {
        knots: Vec<f64>,
        values: Vec<f64>,
        half_width: f64,
    },
}

impl TransverseProfile {
    pub fn delta(alpha: f64) -> Result<Self, TransverseError> {
        if !(alpha.is_finite() && alpha < 0.0) {
            return Err(TransverseError::InvalidProfile(format!(
                "delta coupling must be negative, got {alpha}"
            )));
        }
        Ok(Self::Delta { alpha })
    }

    pub fn square_well(depth: f64, half_width: f64) -> Result<Self, TransverseError> {
        if !(depth.is_finite() && depth > 0.0) {
            return Err(TransverseError::InvalidProfile(format!(
                "well depth must be positive, got {depth}"
            )));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(TransverseError::InvalidProfile(format!(
                "well half-width must be positive, got {half_width}"
            )));
        }
        Ok(Self::SquareWell { depth, half_width })
    }

    pub fn tabulated(
        knots: Vec<f64>,
        values: Vec<f64>,
        half_width: f64,
    ) -> Result<Self, TransverseError> {
        if knots.len() != values.len() || knots.len() < 2 {
            return Err(TransverseError::InvalidProfile(
                "table needs at least two knots and one value per knot".into(),
            ));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(TransverseError::InvalidProfile(format!(
                "half-width must be positive, got {half_width}"
            )));
        }
        if knots.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(TransverseError::InvalidProfile(
                "knots must be strictly increasing".into(),
            ));
        }
        let eps = 1e-12 * half_width;
        if knots[0] < -half_width - eps || knots[knots.len() - 1] > half_width + eps {
            return Err(TransverseError::InvalidProfile(
                "knots must lie inside [-a, a]".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) || knots.iter().any(|k| !k.is_finite()) {
            return Err(TransverseError::InvalidProfile("non-finite table entry".into()));
        }
        Ok(Self::Tabulated {
            knots,
            values,
            half_width,
        })
    }

    /// Half-width `a` of the support; zero for the delta.
    pub fn support_half_width(&self) -> f64 {
        match self {
            Self::Delta { .. } => 0.0,
            Self::SquareWell { half_width, .. } | Self::Tabulated { half_width, .. } => *half_width,
        }
    }

    pub fn is_delta(&self) -> bool {
        matches!(self, Self::Delta { .. })
    }

    /// `W(t)` for bounded profiles; the delta has no pointwise value and
    /// returns zero.
    pub fn value(&self, t: f64) -> f64 {
        match self {
            Self::Delta { .. } => 0.0,
            Self::SquareWell { depth, half_width } => {
                if t.abs() < *half_width {
                    -depth
                } else {
                    0.0
                }
            }
            Self::Tabulated { knots, values, .. } => interpolate(knots, values, t),
        }
    }

    /// Mean of the one-sided limits `(W(t-) + W(t+)) / 2`, the value used at
    /// grid nodes so that jumps sitting on a node stay second-order accurate.
    pub fn node_value(&self, t: f64) -> f64 {
        match self {
            Self::Delta { .. } => 0.0,
            Self::SquareWell { depth, half_width } => {
                let d = t.abs();
                if d < *half_width {
                    -depth
                } else if d == *half_width {
                    -0.5 * depth
                } else {
                    0.0
                }
            }
            Self::Tabulated { knots, values, .. } => {
                let n = knots.len();
                if t == knots[0] {
                    0.5 * values[0]
                } else if t == knots[n - 1] {
                    0.5 * values[n - 1]
                } else {
                    interpolate(knots, values, t)
                }
            }
        }
    }

    /// Points where `W` is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Self::Delta { .. } => vec![0.0],
            Self::SquareWell { half_width, .. } => vec![-half_width, *half_width],
            Self::Tabulated { knots, .. } => knots.clone(),
        }
    }

    /// `∫ W`.
    pub fn integral(&self) -> f64 {
        match self {
            Self::Delta { alpha } => *alpha,
            Self::SquareWell { depth, half_width } => -2.0 * depth * half_width,
            Self::Tabulated { knots, values, .. } => knots
                .windows(2)
                .zip(values.windows(2))
                .map(|(k, v)| 0.5 * (k[1] - k[0]) * (v[0] + v[1]))
                .sum(),
        }
    }

    /// Squeezed square well of half-width `eps` with the same integral.
    pub fn regularized(&self, eps: f64) -> Result<Self, TransverseError> {
        match self {
            Self::Delta { alpha } => Self::square_well(alpha.abs() / (2.0 * eps), eps),
            _ => Ok(self.clone()),
        }
    }
}

fn interpolate(knots: &[f64], values: &[f64], t: f64) -> f64 {
    let n = knots.len();
    if t < knots[0] || t > knots[n - 1] {
        return 0.0;
    }
    let j = knots.partition_point(|&k| k <= t).clamp(1, n - 1);
    let (k0, k1) = (knots[j - 1], knots[j]);
    let w = (t - k0) / (k1 - k0);
    values[j - 1] * (1.0 - w) + values[j] * w
}

/// Uniform grid `t_i = -L + i h`, `i = 0..=2L/h`, Dirichlet at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Discretization1D {
    half_length: f64,
    step: f64,
}

impl Discretization1D {
    pub fn new(half_length: f64, step: f64) -> Result<Self, TransverseError> {
        if !(step.is_finite() && step > 0.0 && half_length.is_finite() && half_length > 0.0) {
            return Err(TransverseError::InvalidDiscretization(format!(
                "need positive L and h, got L={half_length}, h={step}"
            )));
        }
        let cells = 2.0 * half_length / step;
        if (cells - cells.round()).abs() > 1e-9 * cells.max(1.0) || cells.round() < 2.0 {
            return Err(TransverseError::InvalidDiscretization(format!(
                "2L/h = {cells} is not an integer >= 2"
            )));
        }
        Ok(Self { half_length, step })
    }

    /// Smallest half-length that is a multiple of `step` and covers `extent`.
    pub fn covering(extent: f64, step: f64) -> Result<Self, TransverseError> {
        let k = (extent / step).ceil().max(1.0);
        Self::new(k * step, step)
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn cells(&self) -> usize {
        (2.0 * self.half_length / self.step).round() as usize
    }

    /// Node coordinates including both Dirichlet ends.
    pub fn nodes(&self) -> Vec<f64> {
        let n = self.cells();
        (0..=n)
            .map(|i| -self.half_length + self.step * i as f64)
            .collect()
    }

    pub fn refined(&self) -> Self {
        Self {
            half_length: self.half_length,
            step: 0.5 * self.step,
        }
    }
}

/// Position of the wells in the transverse problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WellPlacement {
    /// `W(t)`.
    Single,
    /// `W(t - R) + W(-t - R)`.
    Double(f64),
}

impl WellPlacement {
    fn node_potential(&self, profile: &TransverseProfile, t: f64) -> f64 {
        match *self {
            Self::Single => profile.node_value(t),
            Self::Double(r) => profile.node_value(t - r) + profile.node_value(-t - r),
        }
    }

    fn delta_sites(&self) -> Vec<f64> {
        match *self {
            Self::Single => vec![0.0],
            Self::Double(r) => vec![-r, r],
        }
    }
}

/// Lowest eigenpair of the finite-difference operator on one grid.
#[derive(Debug, Clone)]
pub struct DiscreteEigenpair {
    pub disc: Discretization1D,
    pub value: f64,
    /// Second eigenvalue, for the simplicity gap.
    pub second: f64,
    /// Interior-node values, positive, normalised to `h Σ v² = 1`.
    pub vector: Vec<f64>,
}

impl DiscreteEigenpair {
    /// Values at all nodes including the zero Dirichlet ends.
    pub fn samples(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.vector.len() + 2);
        out.push(0.0);
        out.extend_from_slice(&self.vector);
        out.push(0.0);
        out
    }

    /// Linear interpolation of the grid function.
    pub fn eval(&self, t: f64) -> f64 {
        let l = self.disc.half_length();
        let h = self.disc.step();
        if t <= -l || t >= l {
            return 0.0;
        }
        let x = (t + l) / h;
        let i = x.floor() as usize;
        let w = x - i as f64;
        let node = |j: usize| {
            if j == 0 || j > self.vector.len() {
                0.0
            } else {
                self.vector[j - 1]
            }
        };
        node(i) * (1.0 - w) + node(i + 1) * w
    }
}

fn finite_difference_operator(
    profile: &TransverseProfile,
    placement: WellPlacement,
    disc: &Discretization1D,
) -> SymTridiagonal {
    let h = disc.step();
    let nodes = disc.nodes();
    let inner = &nodes[1..nodes.len() - 1];
    let mut diag: Vec<f64> = inner
        .iter()
        .map(|&t| 2.0 / (h * h) + placement.node_potential(profile, t))
        .collect();
    if let TransverseProfile::Delta { alpha } = *profile {
        for site in placement.delta_sites() {
            let idx = ((site + disc.half_length()) / h).round() as usize;
            if idx >= 1 && idx < nodes.len() - 1 {
                diag[idx - 1] += alpha / h;
            }
        }
    }
    SymTridiagonal {
        diag,
        off: -1.0 / (h * h),
    }
}

/// Lowest finite-difference eigenpair of `T` or `T_R` on one grid.
pub fn fd_ground_state(
    profile: &TransverseProfile,
    placement: WellPlacement,
    disc: &Discretization1D,
) -> Result<DiscreteEigenpair, TransverseError> {
    let op = finite_difference_operator(profile, placement, disc);
    if op.len() < 2 {
        return Err(TransverseError::InvalidDiscretization(
            "grid has fewer than two interior nodes".into(),
        ));
    }
    let value = op.eigenvalue(0);
    if value >= -NO_BOUND_TOL {
        return Err(TransverseError::NoBoundState(value));
    }
    let second = op.eigenvalue(1);
    let mut vector = op.eigenvector(value);
    let sum: f64 = vector.iter().sum();
    if sum < 0.0 {
        vector.iter_mut().for_each(|v| *v = -*v);
    }
    let norm = (disc.step() * vector.iter().map(|v| v * v).sum::<f64>()).sqrt();
    vector.iter_mut().for_each(|v| *v /= norm);
    Ok(DiscreteEigenpair {
        disc: *disc,
        value,
        second,
        vector,
    })
}

/// Two-level result with Richardson extrapolation `(4 E(h/2) - E(h)) / 3`.
#[derive(Debug, Clone)]
pub struct RichardsonEigen {
    pub coarse: DiscreteEigenpair,
    pub fine: DiscreteEigenpair,
    pub extrapolated: f64,
}

impl RichardsonEigen {
    pub fn disagreement(&self) -> f64 {
        (self.fine.value - self.coarse.value).abs()
    }
}

pub fn fd_richardson(
    profile: &TransverseProfile,
    placement: WellPlacement,
    disc: &Discretization1D,
) -> Result<RichardsonEigen, TransverseError> {
    let coarse = fd_ground_state(profile, placement, disc)?;
    let fine = fd_ground_state(profile, placement, &disc.refined())?;
    if (fine.value - coarse.value).abs() > 0.1 * fine.value.abs() {
        return Err(TransverseError::DiscretizationTooCoarse {
            coarse: coarse.value,
            fine: fine.value,
        });
    }
    let extrapolated = (4.0 * fine.value - coarse.value) / 3.0;
    Ok(RichardsonEigen {
        coarse,
        fine,
        extrapolated,
    })
}

/// Grid adapted to a profile: step `h` (shrunk so the support edges fall on
/// nodes) and a half-length of `a + 20/√(-E1)` from a coarse first pass.
pub fn default_discretization(
    profile: &TransverseProfile,
    step: f64,
) -> Result<Discretization1D, TransverseError> {
    let a = profile.support_half_width();
    let step = aligned_step(step, &[a]);
    let kappa = match profile {
        TransverseProfile::Delta { alpha } => 0.5 * alpha.abs(),
        _ => {
            let probe_step = aligned_step((4.0 * step).min(a / 4.0), &[a]);
            let probe = Discretization1D::covering(a + 60.0, probe_step)?;
            (-fd_ground_state(profile, WellPlacement::Single, &probe)?.value).sqrt()
        }
    };
    Discretization1D::covering(a + 20.0 / kappa, step)
}

/// Largest step not exceeding `step` that puts the first positive entry of
/// `positions` on the grid.
pub fn aligned_step(step: f64, positions: &[f64]) -> f64 {
    match positions.iter().copied().find(|&p| p > 0.0) {
        Some(p) => p / (p / step - 1e-9).ceil(),
        None => step,
    }
}

/// Closed-form or tabulated ground-state eigenfunction.
#[derive(Debug, Clone)]
enum Interior {
    /// Purely exponential, the delta case.
    None,
    /// Cubic Hermite table of `(ξ, ξ')` on a uniform grid over `[-a, a]`.
    Table {
        start: f64,
        step: f64,
        values: Vec<f64>,
        slopes: Vec<f64>,
    },
}

/// Ground state `(E1, ξ1, N+, N-)` of the transverse operator.
///
/// `ξ1` is positive, normalised in `L²(ℝ)` and equals `N± exp(∓√(-E1) t)`
/// for `±t > a`.
#[derive(Debug, Clone)]
pub struct TransverseGroundState {
    pub e1: f64,
    pub n_plus: f64,
    pub n_minus: f64,
    pub norm_check: f64,
    /// Finite-difference two-level data; absent for the closed-form delta.
    pub richardson: Option<RichardsonEigen>,
    support: f64,
    kappa: f64,
    interior: Interior,
}

impl TransverseGroundState {
    /// Decay rate `√(-E1)`.
    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn support_half_width(&self) -> f64 {
        self.support
    }

    pub fn xi(&self, t: f64) -> f64 {
        if t >= self.support {
            return self.n_plus * (-self.kappa * t).exp();
        }
        if t <= -self.support {
            return self.n_minus * (self.kappa * t).exp();
        }
        match &self.interior {
            Interior::None => self.n_plus * (-self.kappa * t.abs()).exp(),
            Interior::Table { .. } => self.hermite(t).0,
        }
    }

    /// `ξ1'(t)`; one-sided from the right at a kink.
    pub fn xi_prime(&self, t: f64) -> f64 {
        if t >= self.support {
            return -self.kappa * self.n_plus * (-self.kappa * t).exp();
        }
        if t < -self.support {
            return self.kappa * self.n_minus * (self.kappa * t).exp();
        }
        match &self.interior {
            Interior::None => -self.kappa * self.n_plus * (-self.kappa * t).exp(),
            Interior::Table { .. } => self.hermite(t).1,
        }
    }

    fn hermite(&self, t: f64) -> (f64, f64) {
        let Interior::Table {
            start,
            step,
            values,
            slopes,
        } = &self.interior
        else {
            unreachable!()
        };
        let x = (t - start) / step;
        let i = (x.floor() as usize).min(values.len() - 2);
        let u = x - i as f64;
        let (p0, p1) = (values[i], values[i + 1]);
        let (m0, m1) = (slopes[i] * step, slopes[i + 1] * step);
        let u2 = u * u;
        let u3 = u2 * u;
        let value = (2.0 * u3 - 3.0 * u2 + 1.0) * p0
            + (u3 - 2.0 * u2 + u) * m0
            + (-2.0 * u3 + 3.0 * u2) * p1
            + (u3 - u2) * m1;
        let d = (6.0 * u2 - 6.0 * u) * p0
            + (3.0 * u2 - 4.0 * u + 1.0) * m0
            + (-6.0 * u2 + 6.0 * u) * p1
            + (3.0 * u2 - 2.0 * u) * m1;
        (value, d / step)
    }

    /// `∫_{lo}^{hi} ξ1²`, with infinite limits allowed; exponential tails are
    /// integrated in closed form.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        if !(hi > lo) {
            return 0.0;
        }
        let a = self.support;
        let k2 = 2.0 * self.kappa;
        let mut total = 0.0;
        // left tail (-inf, -a]
        if lo < -a {
            let top = hi.min(-a);
            let upper = (k2 * top).exp();
            let lower = if lo.is_finite() { (k2 * lo).exp() } else { 0.0 };
            total += self.n_minus * self.n_minus * (upper - lower) / k2;
        }
        // right tail [a, inf)
        if hi > a {
            let bottom = lo.max(a);
            let lower = (-k2 * bottom).exp();
            let upper = if hi.is_finite() { (-k2 * hi).exp() } else { 0.0 };
            total += self.n_plus * self.n_plus * (lower - upper) / k2;
        }
        let (clo, chi) = (lo.max(-a), hi.min(a));
        if chi > clo {
            let gl = GaussLegendre::new(20);
            let mut cuts = vec![clo, chi];
            if clo < 0.0 && chi > 0.0 {
                cuts.insert(1, 0.0);
            }
            for w in cuts.windows(2) {
                total += gl.integrate_composite(&[w[0], w[1]], 0.05, |t| self.xi(t).powi(2));
            }
        }
        total
    }
}

/// Ground state of `T = -d²/dt² + W`.
pub fn solve_ground_state(
    profile: &TransverseProfile,
    disc: &Discretization1D,
) -> Result<TransverseGroundState, TransverseError> {
    match *profile {
        TransverseProfile::Delta { alpha } => Ok(delta_ground_state(alpha)),
        _ => bounded_ground_state(profile, disc),
    }
}

fn delta_ground_state(alpha: f64) -> TransverseGroundState {
    let n = (alpha.abs() / 4.0).sqrt();
    TransverseGroundState {
        e1: -alpha * alpha / 4.0,
        n_plus: n,
        n_minus: n,
        // ∫ (|α|/4) e^{α|t|} dt = 1/2
        norm_check: 0.5,
        richardson: None,
        support: 0.0,
        kappa: -0.5 * alpha,
        interior: Interior::None,
    }
}

/// Steps of the shooting integration across `[-a, a]`.
const SHOOTING_STEPS: usize = 4096;

fn bounded_ground_state(
    profile: &TransverseProfile,
    disc: &Discretization1D,
) -> Result<TransverseGroundState, TransverseError> {
    let rich = fd_richardson(profile, WellPlacement::Single, disc)?;
    let a = profile.support_half_width();
    let spread = rich.disagreement().max(1e-12);
    let shot = polish_by_shooting(profile, rich.extrapolated, spread)?;
    let kappa = (-shot.energy).sqrt();

    let mut state = TransverseGroundState {
        e1: shot.energy,
        n_plus: 0.0,
        n_minus: 0.0,
        norm_check: 0.0,
        richardson: Some(rich),
        support: a,
        kappa,
        interior: Interior::Table {
            start: -a,
            step: 2.0 * a / SHOOTING_STEPS as f64,
            values: shot.values,
            slopes: shot.slopes,
        },
    };
    // normalise: interior by Gauss-Legendre on the Hermite interpolant,
    // tails in closed form
    let (left, right) = match &state.interior {
        Interior::Table { values, .. } => (values[0], values[values.len() - 1]),
        Interior::None => unreachable!(),
    };
    let gl = GaussLegendre::new(8);
    let h = 2.0 * a / SHOOTING_STEPS as f64;
    let mut inner = 0.0;
    for i in 0..SHOOTING_STEPS {
        let lo = -a + h * i as f64;
        inner += gl.integrate(lo, lo + h, |t| state.hermite(t).0.powi(2));
    }
    let total = inner + (left * left + right * right) / (2.0 * kappa);
    let scale = 1.0 / total.sqrt();
    if let Interior::Table { values, slopes, .. } = &mut state.interior {
        values.iter_mut().for_each(|v| *v *= scale);
        slopes.iter_mut().for_each(|v| *v *= scale);
    }
    state.n_minus = left * scale * (kappa * a).exp();
    state.n_plus = right * scale * (kappa * a).exp();
    state.norm_check = state.mass(f64::NEG_INFINITY, f64::INFINITY);
    Ok(state)
}

struct Shot {
    energy: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

/// Integrates `y'' = (W - E) y` across `[-a, a]` from the decaying left tail
/// and returns the mismatch with the decaying right tail.
fn shoot(profile: &TransverseProfile, energy: f64, keep: bool) -> (f64, Vec<f64>, Vec<f64>) {
    let a = profile.support_half_width();
    let kappa = (-energy).sqrt();
    let h = 2.0 * a / SHOOTING_STEPS as f64;
    let mut y = 1.0;
    let mut dy = kappa;
    let mut values = Vec::new();
    let mut slopes = Vec::new();
    if keep {
        values.reserve(SHOOTING_STEPS + 1);
        slopes.reserve(SHOOTING_STEPS + 1);
        values.push(y);
        slopes.push(dy);
    }
    // W is evaluated strictly inside each step's closure so jumps at ±a and
    // kinks at knots never sit inside an RK stage; knots off the step grid
    // only cost local accuracy.
    let w = |t: f64| profile.value(t.clamp(-a * (1.0 - 1e-15), a * (1.0 - 1e-15)));
    for i in 0..SHOOTING_STEPS {
        let t0 = -a + h * i as f64;
        let tm = t0 + 0.5 * h;
        let t1 = t0 + h;
        let f = |t: f64, y: f64| (w(t) - energy) * y;
        let k1y = dy;
        let k1d = f(t0 + 1e-13 * h, y);
        let k2y = dy + 0.5 * h * k1d;
        let k2d = f(tm, y + 0.5 * h * k1y);
        let k3y = dy + 0.5 * h * k2d;
        let k3d = f(tm, y + 0.5 * h * k2y);
        let k4y = dy + h * k3d;
        let k4d = f(t1 - 1e-13 * h, y + h * k3y);
        y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
        dy += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
        if keep {
            values.push(y);
            slopes.push(dy);
        }
    }
    ((dy + kappa * y) / (1.0 + y.abs()), values, slopes)
}

/// Secant refinement of the ground energy started from the finite-difference
/// estimate; rejects results that move further than the grid disagreement.
fn polish_by_shooting(
    profile: &TransverseProfile,
    estimate: f64,
    spread: f64,
) -> Result<Shot, TransverseError> {
    let mut e0 = estimate;
    let mut f0 = shoot(profile, e0, false).0;
    let mut e1 = estimate + 1e-3 * spread.max(1e-9);
    let mut f1 = shoot(profile, e1, false).0;
    for _ in 0..60 {
        if f1 == f0 {
            break;
        }
        let e2 = e1 - f1 * (e1 - e0) / (f1 - f0);
        e0 = e1;
        f0 = f1;
        e1 = e2;
        f1 = shoot(profile, e1, false).0;
        if (e1 - e0).abs() <= 4.0 * f64::EPSILON * e1.abs() || f1 == 0.0 {
            break;
        }
    }
    if !(e1 < 0.0) || (e1 - estimate).abs() > 10.0 * spread + 1e-10 {
        return Err(TransverseError::DiscretizationTooCoarse {
            coarse: estimate,
            fine: e1,
        });
    }
    let (_, values, slopes) = shoot(profile, e1, true);
    Ok(Shot {
        energy: e1,
        values,
        slopes,
    })
}

/// `N±` read off the tail at `t* = a + 1` and checked at `t* = a + 2`.
pub fn tail_constants(
    gs: &TransverseGroundState,
    a: f64,
) -> Result<(f64, f64), TransverseError> {
    let k = gs.kappa();
    let estimate = |t: f64| (gs.xi(t) * (k * t).exp(), gs.xi(-t) * (k * t).exp());
    let (p1, m1) = estimate(a + 1.0);
    let (p2, m2) = estimate(a + 2.0);
    for (first, second) in [(p1, p2), (m1, m2)] {
        if (first - second).abs() > 1e-4 * first.abs() {
            return Err(TransverseError::TailNotExponential { first, second });
        }
    }
    Ok((p1, m1))
}

/// Lowest eigenpair of the double-well operator `T_R`.
#[derive(Debug, Clone)]
pub struct DoubleWellResult {
    pub distance: f64,
    pub e1r: f64,
    pub eigenpair: RichardsonEigen,
    pub upper_bound: f64,
}

impl DoubleWellResult {
    /// Grid eigenfunction on the finer level.
    pub fn xi1r(&self, t: f64) -> f64 {
        self.eigenpair.fine.eval(t)
    }
}

pub fn solve_double_well(
    profile: &TransverseProfile,
    distance: f64,
    step: f64,
) -> Result<DoubleWellResult, TransverseError> {
    let a = profile.support_half_width();
    if !(distance > a) {
        return Err(TransverseError::WellsOverlap { distance, a });
    }
    let single = solve_ground_state(profile, &default_discretization(profile, step)?)?;
    let step = aligned_step(step, &[distance]);
    let disc = Discretization1D::covering(distance + a + 20.0 / single.kappa(), step)?;
    let eigenpair = fd_richardson(profile, WellPlacement::Double(distance), &disc)?;
    Ok(DoubleWellResult {
        distance,
        e1r: eigenpair.extrapolated,
        upper_bound: double_well_upper_bound(&single, distance)?,
        eigenpair,
    })
}

/// Test-function bound `E1 - 2√(-E1) N-² e^{-2√(-E1) R} / ‖ψ‖²` with
/// `ψ(t) = ξ1(|t| - R)` and `‖ψ‖² = 2 ∫_{-R}^{∞} ξ1²`.
pub fn double_well_upper_bound(
    gs: &TransverseGroundState,
    distance: f64,
) -> Result<f64, TransverseError> {
    if !(distance > gs.support_half_width()) {
        return Err(TransverseError::WellsOverlap {
            distance,
            a: gs.support_half_width(),
        });
    }
    Ok(gs.e1 + double_well_boundary_term(gs, distance) / double_well_test_norm(gs, distance))
}

/// Boundary term `-2√(-E1) N-² e^{-2√(-E1) R}` of the integration by parts.
pub fn double_well_boundary_term(gs: &TransverseGroundState, distance: f64) -> f64 {
    let k = gs.kappa();
    -2.0 * k * gs.n_minus * gs.n_minus * (-2.0 * k * distance).exp()
}

pub fn double_well_test_norm(gs: &TransverseGroundState, distance: f64) -> f64 {
    2.0 * gs.mass(-distance, f64::INFINITY)
}

/// `Q[ψ] / ‖ψ‖²` for node samples `psi` (Dirichlet ends included) on `disc`,
/// with the kinetic term from forward differences and trapezoid weights.
/// Delta wells contribute `alpha |ψ(site)|²`.
pub fn rayleigh_quotient_1d(
    profile: &TransverseProfile,
    placement: WellPlacement,
    psi: &[f64],
    disc: &Discretization1D,
) -> Result<f64, TransverseError> {
    let nodes = disc.nodes();
    if psi.len() != nodes.len() {
        return Err(TransverseError::InvalidDiscretization(format!(
            "expected {} samples, got {}",
            nodes.len(),
            psi.len()
        )));
    }
    let h = disc.step();
    let last = psi.len() - 1;
    let weight = |i: usize| if i == 0 || i == last { 0.5 * h } else { h };
    let norm: f64 = psi.iter().enumerate().map(|(i, v)| weight(i) * v * v).sum();
    if !(norm > 0.0) {
        return Err(TransverseError::ZeroTestFunction);
    }
    let kinetic: f64 = psi.windows(2).map(|w| (w[1] - w[0]).powi(2) / h).sum();
    let potential: f64 = match *profile {
        TransverseProfile::Delta { alpha } => placement
            .delta_sites()
            .iter()
            .map(|&site| {
                let idx = ((site + disc.half_length()) / h).round() as usize;
                alpha * psi[idx.min(last)].powi(2)
            })
            .sum(),
        _ => nodes
            .iter()
            .zip(psi)
            .enumerate()
            .map(|(i, (&t, v))| weight(i) * placement.node_potential(profile, t) * v * v)
            .sum(),
    };
    Ok((kinetic + potential) / norm)
}
