use proptest::prelude::*;
use softwg::geometry::{CutRadius, FermiCoordinate, PlanePoint, WaveguideGeometry, CUT_LOCUS_TOL};
use std::f64::consts::{FRAC_PI_2, PI};

/// Distance from `p` to the curve by dense sampling plus golden-section
/// refinement around the best sample.
fn brute_distance(g: &WaveguideGeometry, p: PlanePoint, s_lo: f64, s_hi: f64) -> (f64, f64) {
    let n = 40_000;
    let step = (s_hi - s_lo) / n as f64;
    let d = |s: f64| g.curve_point(s).distance(&p);
    let mut best = (s_lo, d(s_lo));
    for i in 1..=n {
        let s = s_lo + i as f64 * step;
        let v = d(s);
        if v < best.1 {
            best = (s, v);
        }
    }
    let (mut a, mut b) = (best.0 - step, best.0 + step);
    let r = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let c = b - r * (b - a);
        let e = a + r * (b - a);
        if d(c) < d(e) {
            b = e;
        } else {
            a = c;
        }
    }
    let s = 0.5 * (a + b);
    (s, d(s))
}

fn geometry() -> impl Strategy<Value = WaveguideGeometry> {
    (0.5f64..6.0, 0.05f64..PI, 0.05f64..0.95)
        .prop_map(|(r, th, frac)| WaveguideGeometry::new(r, th, frac * r).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn round_trip_inside_cut_radius(g in geometry(), s in -30.0f64..30.0, frac in -0.95f64..0.95) {
        let cp = g.cut_radius_plus(s);
        let limit = 5.0 * g.radius();
        let t = if frac >= 0.0 { frac * cp.as_f64().min(limit) } else { frac * limit };
        let p = g.fermi_map(FermiCoordinate::new(s, t));
        let back = g.inverse_fermi(p).expect("off the cut-locus");
        prop_assert!((back.s - s).abs() < 1e-9, "s: {} vs {}", back.s, s);
        prop_assert!((back.t - t).abs() < 1e-9, "t: {} vs {}", back.t, t);
        prop_assert!(g.jacobian(back) > 0.0);
    }

    #[test]
    fn unit_speed_everywhere(g in geometry(), s in -20.0f64..20.0) {
        let eps = 1e-6 * g.radius();
        let a = g.curve_point(s - eps);
        let b = g.curve_point(s + eps);
        let speed = a.distance(&b) / (2.0 * eps);
        prop_assert!((speed - 1.0).abs() < 1e-8);
        let t = g.tangent(s);
        let n = g.normal(s);
        prop_assert!((t[0] * n[0] + t[1] * n[1]).abs() < 1e-15);
    }
}

#[test]
fn distance_law_against_dense_minimisation() {
    let g = WaveguideGeometry::new(4.0, FRAC_PI_2, 0.5).unwrap();
    for &(s, t) in &[(0.0, -1.0), (1.0, 2.5), (-2.5, 3.0), (5.0, -2.0), (-9.0, 6.0), (12.0, 1.0)] {
        let p = g.fermi_map(FermiCoordinate::new(s, t));
        let (_, d) = brute_distance(&g, p, -60.0, 60.0);
        assert!((d - t.abs()).abs() < 1e-9, "({s}, {t}): {d}");
    }
}

#[test]
fn inverse_recovers_far_point() {
    let g = WaveguideGeometry::new(4.0, FRAC_PI_2, 0.5).unwrap();
    let p = PlanePoint::new(10.0, 1.0);
    let c = g.inverse_fermi(p).unwrap();
    let (s_ref, d_ref) = brute_distance(&g, p, -60.0, 60.0);
    assert!((c.s - s_ref).abs() < 1e-6);
    assert!((c.t.abs() - d_ref).abs() < 1e-10);
    let q = g.fermi_map(c);
    assert!(q.distance(&p) < 1e-10);
}

#[test]
fn cut_locus_and_cut_radius() {
    let g = WaveguideGeometry::new(4.0, FRAC_PI_2, 0.5).unwrap();
    assert!(g.on_cut_locus(PlanePoint::new(0.0, 4.0), CUT_LOCUS_TOL));
    assert!(!g.on_cut_locus(PlanePoint::new(0.0, 3.9), CUT_LOCUS_TOL));
    assert!(g.inverse_fermi(PlanePoint::new(0.0, 5.0)).is_none());
    let half = g.half_arc_length();
    assert_eq!(g.cut_radius_plus(0.0), CutRadius::Finite(4.0));
    assert!((g.cut_radius_plus(half).as_f64() - 4.0).abs() < 1e-12);
    assert!((g.cut_radius_plus(half + 1e-9).as_f64() - 4.0).abs() < 1e-8);
    assert!(g.cut_radius_minus(0.0).is_infinite());
    // f(s, c₊(s)) vanishes on the arc and equals 1 on the lines
    assert_eq!(g.jacobian(FermiCoordinate::new(1.0, 4.0)), 0.0);
    let c = g.cut_radius_plus(10.0).as_f64();
    assert_eq!(g.jacobian(FermiCoordinate::new(10.0, c)), 1.0);

    let straight = WaveguideGeometry::new(4.0, 0.0, 10.0).unwrap();
    assert!(straight.cut_radius_plus(5.0).is_infinite());
    assert!(!straight.on_cut_locus(PlanePoint::new(0.0, 100.0), CUT_LOCUS_TOL));

    let folded = WaveguideGeometry::new(4.0, PI, 0.5).unwrap();
    for s in [-50.0, -3.0, 0.0, 7.0, 100.0] {
        assert_eq!(folded.cut_radius_plus(s), CutRadius::Finite(4.0));
    }
}

#[test]
fn junctions_are_c1() {
    for theta in [0.3, FRAC_PI_2, 2.9, PI] {
        let g = WaveguideGeometry::new(3.0, theta, 0.5).unwrap();
        let half = g.half_arc_length();
        for s0 in [-half, half] {
            let a = g.curve_point(s0 - 1e-13);
            let b = g.curve_point(s0 + 1e-13);
            assert!(a.distance(&b) < 1e-12);
            let ta = g.tangent(s0 - 1e-13);
            let tb = g.tangent(s0 + 1e-13);
            assert!((ta[0] - tb[0]).abs() < 1e-12 && (ta[1] - tb[1]).abs() < 1e-12);
        }
    }
}
