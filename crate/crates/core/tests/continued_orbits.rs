//! End-to-end continuation checks against frozen reference values.

use approx::assert_abs_diff_eq;
use rtbp_core::arcs;
use rtbp_core::continuation::{
    self, continuation_sweep, find_orbit, ShootingProblem, SweepOptions,
};
use rtbp_core::dynamics::{Frame, IntegrateOptions, MomentumBranch};
use rtbp_core::Rotation;
use std::f64::consts::PI;

const SUN_JUPITER: f64 = 0.000953;
const EARTH_MOON: f64 = 0.012143;

#[test]
fn earth_moon_continuation_matches_reference() {
    let arc = arcs::arc_for_theta(PI / 18.0, 1, Rotation::Direct).unwrap();
    let opts = SweepOptions {
        mus: vec![SUN_JUPITER, EARTH_MOON],
        parallel: false,
        ..Default::default()
    };
    let sweep = &continuation_sweep(std::slice::from_ref(&arc), &opts)[0];
    assert_eq!(sweep.crossing_index, 1);
    let (_, sj) = &sweep.cells[0];
    let sj = sj.as_ref().expect("Sun-Jupiter cell solved");
    assert_abs_diff_eq!(sj.q0_distance, 2.288901, epsilon = 1e-4);
    assert_abs_diff_eq!(sj.action, 0.485253, epsilon = 1e-4);
    let (_, em) = &sweep.cells[1];
    let em = em.as_ref().expect("Earth-Moon cell solved");
    assert_abs_diff_eq!(em.q0_distance, 2.281639, epsilon = 1e-4);
    assert_abs_diff_eq!(em.action, 0.590492, epsilon = 1e-4);
    for (_, cell) in &sweep.cells {
        let row = cell.as_ref().unwrap();
        assert_eq!((row.rot, row.w1, row.w2), (-1, -1, 0));
        assert_eq!(row.beta0, -1);
        assert!(row.closure_gap <= 1e-8);
        assert!(row.energy_drift <= 1e-9);
        // The orbit avoids the secondary by a distance of order mu.
        assert!(row.min_secondary_distance > 1e-3 * opts.mus[0]);
    }
}

#[test]
fn explicit_shooting_problem_surface() {
    // Bracketing around the known Earth-Moon root exercises find_orbit
    // directly; the residual changes sign across the root.
    let arc = arcs::arc_for_theta(PI / 18.0, 1, Rotation::Direct).unwrap();
    let x_root = -2.281640; // barycentric abscissa of the reference row
    let problem = ShootingProblem {
        mu: EARTH_MOON,
        energy: arc.h0,
        crossing_index: 1,
        bracket: (x_root - 2e-4, x_root + 2e-4),
        branch: MomentumBranch::Plus,
        frame: Frame::Barycentric,
        options: IntegrateOptions::default(),
    };
    let lo = continuation::shoot(
        problem.bracket.0,
        problem.mu,
        problem.energy,
        problem.crossing_index,
        problem.branch,
        problem.frame,
        &problem.options,
    )
    .unwrap();
    let hi = continuation::shoot(
        problem.bracket.1,
        problem.mu,
        problem.energy,
        problem.crossing_index,
        problem.branch,
        problem.frame,
        &problem.options,
    )
    .unwrap();
    assert!(lo.signum() != hi.signum(), "residuals {lo} and {hi} do not bracket");

    let orbit = find_orbit(&problem).unwrap();
    assert_abs_diff_eq!(orbit.q0_distance(), 2.281640, epsilon = 1e-4);
    assert_eq!(continuation::beta0_integral(&orbit), -1);
    assert!(orbit.closure_gap <= 1e-8);
    assert!(orbit.energy_drift() <= 1e-9);
    // The winding data is stable under sampling refinement: recompute
    // on a freshly integrated trajectory at a tighter tolerance.
    let tight = ShootingProblem {
        options: IntegrateOptions { rtol: 1e-13, atol: 1e-13, ..Default::default() },
        ..problem
    };
    let orbit2 = find_orbit(&tight).unwrap();
    assert_eq!((orbit2.rot, orbit2.w1, orbit2.w2), (orbit.rot, orbit.w1, orbit.w2));
}

#[test]
fn loop_family_beyond_perpendicular_angle() {
    // theta > pi/2: an extra loop forms around the secondary and the
    // winding signature changes, but the generator integral stays -1.
    let arc = arcs::arc_for_theta(2.0 * PI / 3.0, 1, Rotation::Direct).unwrap();
    let opts = SweepOptions { mus: vec![SUN_JUPITER], parallel: false, ..Default::default() };
    let sweep = &continuation_sweep(std::slice::from_ref(&arc), &opts)[0];
    assert_eq!(sweep.crossing_index, 2);
    let row = sweep.cells[0].1.as_ref().expect("cell solved");
    assert_abs_diff_eq!(row.q0_distance, 2.233168, epsilon = 1e-4);
    assert_abs_diff_eq!(row.action, -6.170932, epsilon = 1e-4);
    assert_eq!((row.rot, row.w1, row.w2), (-2, -1, -2));
    assert_eq!(row.beta0, -1);
}

#[test]
fn action_converges_to_generating_action() {
    let arc = arcs::arc_for_theta(PI / 3.0, 1, Rotation::Direct).unwrap();
    let opts = SweepOptions {
        mus: vec![1e-5, 1e-4, 1e-3],
        parallel: false,
        ..Default::default()
    };
    let sweep = &continuation_sweep(std::slice::from_ref(&arc), &opts)[0];
    let gaps: Vec<f64> = sweep
        .cells
        .iter()
        .map(|(_, cell)| (cell.as_ref().unwrap().action - arc.action).abs())
        .collect();
    // Ascending mu: the action gap grows; equivalently it shrinks to 0.
    assert!(gaps[0] < gaps[1] && gaps[1] < gaps[2], "gaps {gaps:?}");
    // The gap scales roughly linearly in mu (about 29 mu here).
    assert!(gaps[0] < 5e-4);
}
