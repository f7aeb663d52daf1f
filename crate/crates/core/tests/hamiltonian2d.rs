use softwg::geometry::WaveguideGeometry;
use softwg::hamiltonian2d::*;
use softwg::transverse::{fd_ground_state, Discretization1D, TransverseProfile, WellPlacement};
use std::f64::consts::{FRAC_PI_2, PI};

#[test]
fn straight_guide_separates() {
    // edges at ±0.53 never sit on a node, so point sampling equals the 1D node values
    let profile = TransverseProfile::square_well(2.0, 0.53).unwrap();
    let g = WaveguideGeometry::new(4.0, 0.0, 1.0).unwrap();
    let h = 0.1;
    let grid = Grid2D::new(-5.0, 5.0, -3.0, 3.0, h).unwrap();
    let mut opts = SolverOptions::new(2);
    opts.sampling.sampling = Some(Sampling::Point);
    let sol = solve_on_grid(&g, &profile, &grid, &opts).unwrap();

    let transverse = fd_ground_state(
        &profile,
        WellPlacement::Single,
        &Discretization1D::new(3.0, h).unwrap(),
    )
    .unwrap();
    let long = |k: f64| (2.0 - 2.0 * (k * PI * h / 10.0).cos()) / (h * h);
    for (i, k) in [1.0, 2.0].iter().enumerate() {
        let exact = transverse.value + long(*k);
        let got = sol.level.eigenvalues[i];
        assert!((got - exact).abs() < 1e-8, "{got} vs {exact}");
    }
}

#[test]
fn two_level_report_is_consistent() {
    let profile = TransverseProfile::square_well(2.0, 0.5).unwrap();
    let g = WaveguideGeometry::new(4.0, FRAC_PI_2, 0.5).unwrap();
    let grid = Grid2D::new(-10.0, 10.0, -6.0, 10.0, 0.25).unwrap();
    let report = discrete_spectrum(&g, &profile, &grid, 2, 1.0, &SolverOptions::new(2)).unwrap();
    assert_eq!(report.levels.len(), 2);
    assert_eq!(report.order, 2);
    assert!(report.levels[1].dim > 3 * report.levels[0].dim);
    assert!(report.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    for i in 0..report.eigenvalues.len() {
        assert_eq!(report.margins[i], report.threshold - report.eigenvalues[i]);
    }
    assert!(report.threshold < -0.6 && report.threshold > -0.63);
    assert!(report.binding_count <= report.eigenvalues.len());

    let tight = discrete_spectrum(&g, &profile, &grid, 2, 1e-12, &SolverOptions::new(2));
    match tight {
        Err(HamiltonianError::NotConverged { report, .. }) => assert_eq!(report.levels.len(), 2),
        other => panic!("{other:?}"),
    }
}

fn lambda_in_square_box(l: f64) -> f64 {
    let profile = TransverseProfile::square_well(2.0, 0.5).unwrap();
    let g = WaveguideGeometry::new(4.0, FRAC_PI_2, 0.5).unwrap();
    let grid = Grid2D::new(-l, l, -l, l, 0.125).unwrap();
    solve_on_grid(&g, &profile, &grid, &SolverOptions::new(1))
        .unwrap()
        .level
        .eigenvalues[0]
}

#[test]
fn box_truncation_decreases() {
    let (small, large) = (lambda_in_square_box(20.0), lambda_in_square_box(26.0));
    assert!(large < small, "{large} vs {small}");
}

// Measured gap 7.9e-4 at h = 1/8: the state is bound by ~2.5e-4, so its decay
// length along the arms (~60) exceeds both boxes.
#[test]
#[ignore = "binding too weak for the boxes to capture the longitudinal tail"]
fn box_truncation_stabilises() {
    let (small, large) = (lambda_in_square_box(20.0), lambda_in_square_box(26.0));
    assert!(small - large < 1e-4, "{small} - {large}");
}
