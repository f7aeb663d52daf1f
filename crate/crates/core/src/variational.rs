//! Test functions `ψₙ(s,t) = φₙ(s) ξ₁(t)` and the shifted form
//! `Q̃[ψ] = Q[ψ] - E₁‖ψ‖²` in Fermi coordinates.
//!
//! Two evaluation paths are provided. The bracket path uses the form after
//! integration by parts in `t`: a mollifier term `Q̃₁`, a constant arc term
//! `Q̃₂^int` and a negative line term `Q̃₂^ext`. The raw path integrates the
//! transformed form directly over `U` by tensor quadrature. Both must agree.

use thiserror::Error;

use crate::geometry::{CutRadius, WaveguideGeometry};
use crate::quadrature::{breakpoints_within, panels, GaussLegendre};
use crate::transverse::{TransverseGroundState, TransverseProfile};

/// Absolute margin a form value must clear to count as a certificate.
pub const CERTIFICATE_MARGIN: f64 = 1e-12;

/// Relative change allowed when the quadrature order is doubled.
pub const QUADRATURE_TOL: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VariationalError {
    #[error("mollifier index must be positive")]
    InvalidMollifier,
    #[error("mollifier n = {n} is narrower than the arc half-length {half_arc}")]
    MollifierTooNarrow { n: u64, half_arc: f64 },
    #[error("the line contribution diverges for a fully folded curve")]
    DivergentExt,
    #[error("quadrature not converged: {coarse} vs {fine} after doubling")]
    QuadratureNotConverged { coarse: f64, fine: f64 },
    #[error("no negative form value up to n = {last_n} (last value {last_value})")]
    CertificateNotFound { last_n: u64, last_value: f64 },
    #[error("profile support {support} exceeds the channel half-width {a}")]
    ProfileWiderThanChannel { support: f64, a: f64 },
}

/// Plateau cutoff `φₙ`: 1 on `[-n, n]`, 0 outside `[-2n, 2n]`, linear between.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mollifier {
    n: u64,
}

impl Mollifier {
    pub fn new(n: u64) -> Result<Self, VariationalError> {
        if n == 0 {
            return Err(VariationalError::InvalidMollifier);
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn value(&self, s: f64) -> f64 {
        let n = self.n as f64;
        let a = s.abs();
        if a <= n {
            1.0
        } else if a >= 2.0 * n {
            0.0
        } else {
            (2.0 * n - a) / n
        }
    }

    pub fn derivative(&self, s: f64) -> f64 {
        let n = self.n as f64;
        let a = s.abs();
        if a > n && a < 2.0 * n {
            -s.signum() / n
        } else {
            0.0
        }
    }

    fn check_covers_arc(&self, g: &WaveguideGeometry) -> Result<(), VariationalError> {
        let half_arc = g.half_arc_length();
        if (self.n as f64) < half_arc {
            return Err(VariationalError::MollifierTooNarrow {
                n: self.n,
                half_arc,
            });
        }
        Ok(())
    }
}

pub fn mollifier_value(m: &Mollifier, s: f64) -> f64 {
    m.value(s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormBreakdown {
    pub n: u64,
    pub q1: f64,
    pub q2_int: f64,
    pub q2_ext: f64,
    pub total: f64,
}

impl FormBreakdown {
    fn new(n: u64, q1: f64, q2_int: f64, q2_ext: f64) -> Self {
        Self {
            n,
            q1,
            q2_int,
            q2_ext,
            total: q1 + q2_int + q2_ext,
        }
    }
}

/// GL order per panel for the bracket-path quadratures.
const ORDER: usize = 16;

/// Decay length of `ξ₁(c₊(s))²` along the lines, `None` when `c₊` is
/// constant there.
fn line_decay_length(g: &WaveguideGeometry, gs: &TransverseGroundState) -> Option<f64> {
    let theta = g.theta();
    (theta > 0.0 && theta < std::f64::consts::PI)
        .then(|| (0.5 * theta).tan() / (2.0 * gs.kappa()))
}

/// `∫ f(s) ds` over `lo_abs ≤ |s| ≤ 2n`, with panels aligned to `±θR/2`,
/// `±n`, `±2n`.
fn integrate_line_part<F: FnMut(f64) -> f64>(
    g: &WaveguideGeometry,
    gs: &TransverseGroundState,
    m: &Mollifier,
    gl: &GaussLegendre,
    lo_abs: f64,
    mut f: F,
) -> f64 {
    let n = m.n as f64;
    let half = g.half_arc_length();
    let hi = 2.0 * n;
    if hi <= lo_abs {
        return 0.0;
    }
    // geometric grading away from the arc ends resolves the exponential
    // decay without paying for it over the whole span
    let mut extra = vec![half, n];
    if let Some(d) = line_decay_length(g, gs) {
        let mut u = d;
        while half + u < hi {
            extra.push(half + u);
            u *= 2.0;
        }
    } else {
        for k in 1..8 {
            extra.push(half + (hi - half) * k as f64 / 8.0);
        }
    }
    let cuts = breakpoints_within(lo_abs, hi, &extra);
    let mut total = 0.0;
    for side in [1.0, -1.0] {
        for w in cuts.windows(2) {
            for (a, b) in panels(w[0], w[1], 0.25 * (w[1] - w[0])) {
                total += gl.integrate(a, b, |u| f(side * u));
            }
        }
    }
    total
}

/// `Q̃₁[ψₙ] = ∫|φ̇ₙ(s)|² ∫_{-c₋}^{c₊} ξ₁(t)² dt ds`; the Jacobian weight is 1
/// on the support of `φ̇ₙ`.
pub fn q_tilde_1(
    g: &WaveguideGeometry,
    gs: &TransverseGroundState,
    m: &Mollifier,
) -> Result<f64, VariationalError> {
    m.check_covers_arc(g)?;
    let gl = GaussLegendre::new(ORDER);
    let n = m.n as f64;
    Ok(integrate_line_part(g, gs, m, &gl, n, |s| {
        let d = m.derivative(s);
        let mass = match g.cut_radius_plus(s) {
            CutRadius::Infinite => gs.mass(f64::NEG_INFINITY, f64::INFINITY),
            CutRadius::Finite(c) => gs.mass(f64::NEG_INFINITY, c),
        };
        d * d * mass
    }))
}

/// Closed form `Q̃₂^int = ξ₁(R)² θ/2`.
pub fn q_tilde_2_int_closed(g: &WaveguideGeometry, gs: &TransverseGroundState) -> f64 {
    let xr = gs.xi(g.radius());
    xr * xr * 0.5 * g.theta()
}

/// `Q̃₂^int` by quadrature of `½ξ₁²κ + ξ₁ξ̇₁(1 - κt)` at `t = c₊(s)` over the
/// arc interval.
pub fn q_tilde_2_int_bracket(g: &WaveguideGeometry, gs: &TransverseGroundState) -> f64 {
    let half = g.half_arc_length();
    if half == 0.0 {
        return 0.0;
    }
    let gl = GaussLegendre::new(ORDER);
    gl.integrate_composite(&[-half, 0.0, half], half, |s| {
        let c = g.cut_radius_plus(s).as_f64();
        let k = g.curvature(s);
        let x = gs.xi(c);
        0.5 * x * x * k + x * gs.xi_prime(c) * (1.0 - k * c)
    })
}

/// `Q̃₂^ext[ψₙ] = -√(-E₁) ∫_{ℝ∖I} φₙ(s)² ξ₁(c₊(s))² ds` (the `c₋ = ∞` end
/// contributes nothing).
pub fn q_tilde_2_ext(
    g: &WaveguideGeometry,
    gs: &TransverseGroundState,
    m: &Mollifier,
) -> Result<f64, VariationalError> {
    m.check_covers_arc(g)?;
    if g.is_straight() {
        return Ok(0.0);
    }
    let gl = GaussLegendre::new(ORDER);
    let integral = integrate_line_part(g, gs, m, &gl, g.half_arc_length(), |s| {
        let phi = m.value(s);
        let x = gs.xi(g.cut_radius_plus(s).as_f64());
        phi * phi * x * x
    });
    Ok(-gs.kappa() * integral)
}

/// `lim Q̃₂^ext[ψₙ] = -ξ₁(R)² tan(θ/2)`.
pub fn q_tilde_2_ext_limit(
    g: &WaveguideGeometry,
    gs: &TransverseGroundState,
) -> Result<f64, VariationalError> {
    if g.is_straight() {
        return Ok(0.0);
    }
    if g.theta() >= std::f64::consts::PI {
        return Err(VariationalError::DivergentExt);
    }
    let xr = gs.xi(g.radius());
    Ok(-xr * xr * (0.5 * g.theta()).tan())
}

/// `lim Q̃[ψₙ] = ξ₁(R)² (θ/2 - tan(θ/2))`.
pub fn variational_limit(
    g: &WaveguideGeometry,
    gs: &TransverseGroundState,
) -> Result<f64, VariationalError> {
    Ok(q_tilde_2_int_closed(g, gs) + q_tilde_2_ext_limit(g, gs)?)
}

/// Bracket-path breakdown: quadrature `Q̃₁`, closed-form `Q̃₂^int`,
/// quadrature `Q̃₂^ext`.
pub fn form_breakdown(
    g: &WaveguideGeometry,
    gs: &TransverseGroundState,
    m: &Mollifier,
) -> Result<FormBreakdown, VariationalError> {
    Ok(FormBreakdown::new(
        m.n,
        q_tilde_1(g, gs, m)?,
        q_tilde_2_int_closed(g, gs),
        q_tilde_2_ext(g, gs, m)?,
    ))
}

/// Transverse integrals of the raw form for one `s`-region, i.e. one value
/// of the curvature. Everything below `t = a` is independent of `c₊(s)` and
/// is computed once; the part above uses the exponential tail in closed
/// form.
struct TransverseRule {
    kappa_e: f64,
    n_plus: f64,
    support: f64,
    /// `∫_{-∞}^{a} (ξ̇² + (W - E₁)ξ²)(1 - κt) dt`, the delta term included.
    energy_core: f64,
    /// `∫_{-∞}^{a} ξ² dt`.
    mass_core: f64,
    curvature: f64,
}

/// `∫_lo^hi (p + q t) e^{λt} dt`, `λ ≠ 0`, `hi` may be `+∞` when `λ < 0` and
/// `lo` may be `-∞` when `λ > 0`.
fn exp_linear(p: f64, q: f64, lambda: f64, lo: f64, hi: f64) -> f64 {
    let anti = |t: f64| {
        if t.is_infinite() {
            0.0
        } else {
            (lambda * t).exp() * ((p + q * t) / lambda - q / (lambda * lambda))
        }
    };
    anti(hi) - anti(lo)
}

impl TransverseRule {
    fn new(
        profile: &TransverseProfile,
        gs: &TransverseGroundState,
        curvature: f64,
        order: usize,
    ) -> Self {
        let k = gs.kappa();
        let a = gs.support_half_width();
        let e1 = gs.e1;
        let w = |t: f64| 1.0 - curvature * t;
        // lower tail (-∞, -a]: ξ = N₋ e^{κt}, ξ̇² - E₁ξ² = 2κ²ξ²
        let nm2 = gs.n_minus * gs.n_minus;
        let mut energy = exp_linear(
            2.0 * k * k * nm2,
            -2.0 * k * k * nm2 * curvature,
            2.0 * k,
            f64::NEG_INFINITY,
            -a,
        );
        let mut mass = nm2 * (-2.0 * k * a).exp() / (2.0 * k);
        if a > 0.0 {
            let gl = GaussLegendre::new(order);
            let mut extra = profile.breakpoints();
            extra.push(0.0);
            let cuts = breakpoints_within(-a, a, &extra);
            for c in cuts.windows(2) {
                for (lo, hi) in panels(c[0], c[1], 0.05) {
                    for (t, wt) in gl.mapped(lo, hi) {
                        let x = gs.xi(t);
                        let dx = gs.xi_prime(t);
                        energy += wt * (dx * dx + (profile.value(t) - e1) * x * x) * w(t);
                        mass += wt * x * x;
                    }
                }
            }
        }
        if let TransverseProfile::Delta { alpha } = *profile {
            let x0 = gs.xi(0.0);
            energy += alpha * x0 * x0;
        }
        Self {
            kappa_e: k,
            n_plus: gs.n_plus,
            support: a,
            energy_core: energy,
            mass_core: mass,
            curvature,
        }
    }

    /// `∫_{-∞}^{c} (ξ̇² + (W - E₁)ξ²)(1 - κt) dt`.
    fn energy(&self, c: CutRadius) -> f64 {
        let k = self.kappa_e;
        let np2 = self.n_plus * self.n_plus;
        let hi = c.as_f64();
        self.energy_core
            + exp_linear(
                2.0 * k * k * np2,
                -2.0 * k * k * np2 * self.curvature,
                -2.0 * k,
                self.support,
                hi,
            )
    }

    /// `∫_{-∞}^{c} ξ² dt`.
    fn mass(&self, c: CutRadius) -> f64 {
        let k = self.kappa_e;
        let np2 = self.n_plus * self.n_plus;
        let tail_end = match c {
            CutRadius::Infinite => 0.0,
            CutRadius::Finite(c) => (-2.0 * k * c).exp(),
        };
        self.mass_core + np2 * ((-2.0 * k * self.support).exp() - tail_end) / (2.0 * k)
    }
}

fn raw_breakdown(
    g: &WaveguideGeometry,
    profile: &TransverseProfile,
    gs: &TransverseGroundState,
    m: &Mollifier,
    order: usize,
) -> FormBreakdown {
    let gl = GaussLegendre::new(order);
    let line = TransverseRule::new(profile, gs, 0.0, order);
    let half = g.half_arc_length();
    let n = m.n as f64;

    let q1 = integrate_line_part(g, gs, m, &gl, n, |s| {
        let d = m.derivative(s);
        d * d * line.mass(g.cut_radius_plus(s))
    });
    let q2_int = if half > 0.0 {
        let arc = TransverseRule::new(profile, gs, 1.0 / g.radius(), order);
        gl.integrate_composite(&[-half, 0.0, half], half, |s| {
            let phi = m.value(s);
            phi * phi * arc.energy(g.cut_radius_plus(s))
        })
    } else {
        0.0
    };
    let q2_ext = integrate_line_part(g, gs, m, &gl, half, |s| {
        let phi = m.value(s);
        phi * phi * line.energy(g.cut_radius_plus(s))
    });
    FormBreakdown::new(m.n, q1, q2_int, q2_ext)
}

/// `Q̃[ψₙ]` evaluated from the transformed form itself (no integration by
/// parts), split over the same regions as the bracket path. The quadrature
/// order is doubled once as a convergence check.
pub fn q_tilde_full_quadrature(
    g: &WaveguideGeometry,
    profile: &TransverseProfile,
    gs: &TransverseGroundState,
    m: &Mollifier,
) -> Result<FormBreakdown, VariationalError> {
    m.check_covers_arc(g)?;
    let support = profile.support_half_width();
    if support > g.half_width() {
        return Err(VariationalError::ProfileWiderThanChannel {
            support,
            a: g.half_width(),
        });
    }
    let coarse = raw_breakdown(g, profile, gs, m, 8);
    let fine = raw_breakdown(g, profile, gs, m, 16);
    let scale = fine.q1.abs() + fine.q2_int.abs() + fine.q2_ext.abs();
    if (fine.total - coarse.total).abs() > QUADRATURE_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(VariationalError::QuadratureNotConverged {
            coarse: coarse.total,
            fine: fine.total,
        });
    }
    Ok(fine)
}

/// Smallest `n` in `⌈θR/2⌉, 2⌈θR/2⌉, 4⌈θR/2⌉, …` with
/// `Q̃[ψₙ] < -CERTIFICATE_MARGIN`, together with that value.
pub fn bound_state_certificate(
    g: &WaveguideGeometry,
    profile: &TransverseProfile,
    gs: &TransverseGroundState,
) -> Result<(u64, f64), VariationalError> {
    let limit = 1e6 * g.theta() * g.radius();
    let mut n = (g.half_arc_length().ceil() as u64).max(1);
    let mut last_value = f64::NAN;
    let mut last_n = n;
    while (n as f64) <= limit {
        let form = q_tilde_full_quadrature(g, profile, gs, &Mollifier::new(n)?)?;
        if form.total < -CERTIFICATE_MARGIN {
            return Ok((n, form.total));
        }
        last_value = form.total;
        last_n = n;
        n *= 2;
    }
    Err(VariationalError::CertificateNotFound { last_n, last_value })
}
