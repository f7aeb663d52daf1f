use softwg::transverse::*;

/// Even ground state of the square well `-V0` on `(-a, a)`:
/// root of `√(-E) = √(V0+E) tan(a√(V0+E))` by bisection.
fn square_well_root(v0: f64, a: f64) -> f64 {
    let f = |e: f64| (-e).sqrt() - (v0 + e).sqrt() * (a * (v0 + e).sqrt()).tan();
    let upper = (-v0 + (std::f64::consts::FRAC_PI_2 / a).powi(2)).min(0.0);
    let (mut lo, mut hi) = (-v0 + 1e-15, upper - 1e-15);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(lo) * f(mid) <= 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn square_well_energy_and_tails() {
    let p = TransverseProfile::square_well(1.0, 1.0).unwrap();
    let gs = solve_ground_state(&p, &Discretization1D::new(30.0, 1.0 / 32.0).unwrap()).unwrap();
    let exact = square_well_root(1.0, 1.0);
    assert!((gs.e1 - exact).abs() < 1e-6, "{} vs {exact}", gs.e1);
    assert!((gs.norm_check - 1.0).abs() < 1e-8);

    // matching constant of the exact eigenfunction: cos(q t) inside, N e^{-κ|t|} outside
    let q = (1.0 + exact).sqrt();
    let k = (-exact).sqrt();
    let norm2 = 1.0 + (2.0 * q).sin() / (2.0 * q) + q.cos().powi(2) / k;
    let n_exact = q.cos() * k.exp() / norm2.sqrt();
    let (np, nm) = tail_constants(&gs, 1.0).unwrap();
    assert!((np - n_exact).abs() < 1e-4 * n_exact);
    assert_eq!(np, nm);
    for t in [0.0, 0.3, 0.9, 1.5, 4.0] {
        assert!((gs.xi(t) - gs.xi(-t)).abs() < 1e-10);
        assert!(gs.xi(t) > 0.0);
    }
}

#[test]
fn squeezed_wells_converge_at_first_order() {
    let p = TransverseProfile::delta(-1.0).unwrap();
    let errs: Vec<f64> = [0.1, 0.05, 0.025]
        .iter()
        .map(|&eps| {
            let w = p.regularized(eps).unwrap();
            let disc = default_discretization(&w, eps / 16.0).unwrap();
            (solve_ground_state(&w, &disc).unwrap().e1 + 0.25).abs()
        })
        .collect();
    for pair in errs.windows(2) {
        let ratio = pair[0] / pair[1];
        assert!((1.6..=2.4).contains(&ratio), "{errs:?}");
    }
}

#[test]
fn double_well_below_single_and_bound() {
    let p = TransverseProfile::delta(-1.0).unwrap();
    let mut gaps = Vec::new();
    for r in [3.0, 5.0, 7.0] {
        let dw = solve_double_well(&p, r, 1.0 / 256.0).unwrap();
        assert!(dw.e1r < -0.25);
        assert!(dw.e1r <= dw.upper_bound + 1e-6, "{} vs {}", dw.e1r, dw.upper_bound);
        gaps.push((r, (-0.25 - dw.e1r).ln()));
    }
    let slope = (gaps[2].1 - gaps[0].1) / (gaps[2].0 - gaps[0].0);
    assert!((slope + 1.0).abs() <= 0.1, "slope {slope}");
}

#[test]
fn double_well_bound_for_square_well() {
    let p = TransverseProfile::square_well(1.0, 1.0).unwrap();
    let dw = solve_double_well(&p, 4.0, 1.0 / 64.0).unwrap();
    let single = solve_ground_state(&p, &default_discretization(&p, 1.0 / 64.0).unwrap()).unwrap();
    assert!(dw.e1r < single.e1);
    assert!(dw.e1r <= dw.upper_bound);
}

#[test]
fn rayleigh_quotient_of_test_function() {
    let p = TransverseProfile::delta(-1.0).unwrap();
    let gs = solve_ground_state(&p, &Discretization1D::new(1.0, 0.5).unwrap()).unwrap();
    let bound = double_well_upper_bound(&gs, 4.0).unwrap();
    let disc = Discretization1D::new(40.0, 1.0 / 2048.0).unwrap();
    let psi: Vec<f64> = disc
        .nodes()
        .iter()
        .map(|&t| if t >= 0.0 { gs.xi(t - 4.0) } else { gs.xi(-t - 4.0) })
        .collect();
    let rq = rayleigh_quotient_1d(&p, WellPlacement::Double(4.0), &psi, &disc).unwrap();
    assert!((rq - bound).abs() < 1e-6, "{rq} vs {bound}");
    assert!(matches!(
        rayleigh_quotient_1d(&p, WellPlacement::Single, &vec![0.0; psi.len()], &disc),
        Err(TransverseError::ZeroTestFunction)
    ));
}
