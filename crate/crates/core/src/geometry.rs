//! Planar geometry of a curve made of a circular arc of radius `R` and
//! opening angle `theta`, continued by two tangent semi-lines.
//!
//! The curve is parameterised by arc length `s` with `s = 0` at the bottom of
//! the arc, which sits at the origin; the arc centre is `(0, R)`. The unit
//! normal is the tangent rotated by +90°, so on the arc it points towards the
//! centre and the curvature is `+1/R` there.
//!
//! Parallel (Fermi) coordinates `(s, t)` are mapped to the plane by
//! `Φ(s, t) = Γ(s) + t N(s)`. For `theta > 0` the cut-locus is the vertical
//! half-line `{(0, y) : y ≥ R}`; for a straight line it is empty.

use std::f64::consts::PI;

use thiserror::Error;

/// Points closer than this to the cut-locus are treated as lying on it.
pub const CUT_LOCUS_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("arc radius must be positive and finite, got {0}")]
    Radius(f64),
    #[error("bending angle must lie in [0, pi], got {0}")]
    Angle(f64),
    #[error("half-width must be positive and finite, got {0}")]
    HalfWidth(f64),
    #[error("half-width {a} must be smaller than the arc radius {radius} for a bent curve")]
    Overlap { a: f64, radius: f64 },
}

/// Cartesian point in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanePoint {
    pub x: f64,
    pub y: f64,
}

impl PlanePoint {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &PlanePoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Parallel coordinates: arc length `s` and signed normal offset `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FermiCoordinate {
    pub s: f64,
    pub t: f64,
}

impl FermiCoordinate {
    pub const fn new(s: f64, t: f64) -> Self {
        Self { s, t }
    }
}

/// Distance along a normal up to which the normal segment stays minimising.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CutRadius {
    Finite(f64),
    Infinite,
}

impl CutRadius {
    pub fn is_infinite(&self) -> bool {
        matches!(self, CutRadius::Infinite)
    }

    /// Value as a float, `+inf` for the infinite radius.
    pub fn as_f64(&self) -> f64 {
        match *self {
            CutRadius::Finite(v) => v,
            CutRadius::Infinite => f64::INFINITY,
        }
    }

    /// Whether `t` lies strictly below the radius.
    pub fn exceeds(&self, t: f64) -> bool {
        match *self {
            CutRadius::Finite(v) => t < v,
            CutRadius::Infinite => true,
        }
    }
}

/// Arc-plus-semilines curve together with the half-width of the channel
/// built along it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveguideGeometry {
    radius: f64,
    theta: f64,
    a: f64,
}

impl WaveguideGeometry {
    pub fn new(radius: f64, theta: f64, a: f64) -> Result<Self, GeometryError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(GeometryError::Radius(radius));
        }
        if !(theta.is_finite() && (0.0..=PI).contains(&theta)) {
            return Err(GeometryError::Angle(theta));
        }
        if !(a.is_finite() && a > 0.0) {
            return Err(GeometryError::HalfWidth(a));
        }
        if theta > 0.0 && a >= radius {
            return Err(GeometryError::Overlap { a, radius });
        }
        Ok(Self { radius, theta, a })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn half_width(&self) -> f64 {
        self.a
    }

    pub fn is_straight(&self) -> bool {
        self.theta == 0.0
    }

    /// Arc length of the half arc, `theta R / 2`.
    pub fn half_arc_length(&self) -> f64 {
        0.5 * self.theta * self.radius
    }

    /// Arc centre `(0, R)`.
    pub fn arc_center(&self) -> PlanePoint {
        PlanePoint::new(0.0, self.radius)
    }

    /// Whether `s` lies in the open arc interval `(-theta R/2, theta R/2)`.
    pub fn on_arc(&self, s: f64) -> bool {
        let half = self.half_arc_length();
        s > -half && s < half
    }

    pub fn curve_point(&self, s: f64) -> PlanePoint {
        let r = self.radius;
        let half = self.half_arc_length();
        let (sn, cs) = (0.5 * self.theta).sin_cos();
        if s <= -half {
            let u = s + half;
            PlanePoint::new(u * cs - r * sn, -u * sn + r * (1.0 - cs))
        } else if s < half {
            let phi = s / r;
            PlanePoint::new(r * phi.sin(), r * (1.0 - phi.cos()))
        } else {
            let u = s - half;
            PlanePoint::new(u * cs + r * sn, u * sn + r * (1.0 - cs))
        }
    }

    /// Unit tangent `Γ'(s)`.
    pub fn tangent(&self, s: f64) -> [f64; 2] {
        let half = self.half_arc_length();
        let (sn, cs) = (0.5 * self.theta).sin_cos();
        if s <= -half {
            [cs, -sn]
        } else if s < half {
            let phi = s / self.radius;
            [phi.cos(), phi.sin()]
        } else {
            [cs, sn]
        }
    }

    /// Unit normal, the tangent rotated by +90°.
    pub fn normal(&self, s: f64) -> [f64; 2] {
        let [tx, ty] = self.tangent(s);
        [-ty, tx]
    }

    /// Signed curvature: `1/R` strictly inside the arc, zero elsewhere
    /// (including both junction points).
    pub fn curvature(&self, s: f64) -> f64 {
        if self.on_arc(s) {
            1.0 / self.radius
        } else {
            0.0
        }
    }

    pub fn fermi_map(&self, c: FermiCoordinate) -> PlanePoint {
        let p = self.curve_point(c.s);
        let [nx, ny] = self.normal(c.s);
        PlanePoint::new(p.x + c.t * nx, p.y + c.t * ny)
    }

    /// Jacobian `1 - κ(s) t` of the Fermi map.
    pub fn jacobian(&self, c: FermiCoordinate) -> f64 {
        1.0 - self.curvature(c.s) * c.t
    }

    /// Cut-radius on the side the normal points to.
    pub fn cut_radius_plus(&self, s: f64) -> CutRadius {
        if self.theta == 0.0 {
            return CutRadius::Infinite;
        }
        let r = self.radius;
        if self.theta == PI {
            return CutRadius::Finite(r);
        }
        let half = self.half_arc_length();
        if s > -half && s < half {
            return CutRadius::Finite(r);
        }
        let tan = (0.5 * self.theta).tan();
        CutRadius::Finite((s.abs() + r * (tan - 0.5 * self.theta)) / tan)
    }

    /// Cut-radius on the convex side; infinite for every member of this family.
    pub fn cut_radius_minus(&self, _s: f64) -> CutRadius {
        CutRadius::Infinite
    }

    /// Whether `(s, t)` belongs to the open domain `U` where the Fermi map is
    /// a diffeomorphism.
    pub fn in_domain(&self, c: FermiCoordinate) -> bool {
        self.cut_radius_plus(c.s).exceeds(c.t) && self.cut_radius_minus(c.s).exceeds(-c.t)
    }

    pub fn on_cut_locus(&self, p: PlanePoint, tol: f64) -> bool {
        if self.theta == 0.0 {
            return false;
        }
        p.x.abs() <= tol && p.y >= self.radius - tol
    }

    /// Inverse of the Fermi map on the complement of the cut-locus.
    ///
    /// The foot point is located by the polar angle of `p` about the arc
    /// centre: inside the angular sector of the arc the foot is the radial
    /// projection onto the arc, otherwise the orthogonal projection onto the
    /// semi-line on the same side of the symmetry axis.
    pub fn inverse_fermi(&self, p: PlanePoint) -> Option<FermiCoordinate> {
        if !p.is_finite() {
            return None;
        }
        if self.theta == 0.0 {
            return Some(FermiCoordinate::new(p.x, p.y));
        }
        if self.on_cut_locus(p, CUT_LOCUS_TOL) {
            return None;
        }
        let r = self.radius;
        let half_theta = 0.5 * self.theta;
        let dx = p.x;
        let dy = p.y - r;
        // angle from the downward direction, positive towards +x
        let phi = dx.atan2(-dy);
        if phi.abs() < half_theta {
            let rho = dx.hypot(dy);
            return Some(FermiCoordinate::new(r * phi, r - rho));
        }
        let (sn, cs) = half_theta.sin_cos();
        let half = self.half_arc_length();
        // mirror to the right half; the left semi-line is the mirror image
        let side = if dx >= 0.0 { 1.0 } else { -1.0 };
        let qx = side * dx - r * sn;
        let qy = p.y - r * (1.0 - cs);
        let along = qx * cs + qy * sn;
        let t = -qx * sn + qy * cs;
        Some(FermiCoordinate::new(side * (half + along), t))
    }
}
