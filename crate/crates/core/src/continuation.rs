//! Continuation of generating orbits to positive mass ratios by
//! perpendicular shooting at fixed energy, with action, winding and
//! integer-certificate computation along the found orbits.
//!
//! Symmetric periodic orbits cross the `q1`-axis perpendicularly twice.
//! Shooting starts on the axis with `p1 = 0` and the momentum fixed by
//! the energy, integrates to the `k`-th axis crossing, and drives `p1`
//! there to zero; the full period is the doubled half period and is
//! re-integrated to certify closure and energy conservation.

use crate::arcs::GeneratingArc;
use crate::dynamics::{
    self, Frame, IntegrateOptions, ModelParams, MomentumBranch, PhaseState, StopCondition,
    Trajectory,
};
use crate::error::{Error, Result};
use crate::rootfind;
use std::f64::consts::PI;

/// Inputs of one symmetric-orbit solve.
#[derive(Debug, Clone)]
pub struct ShootingProblem {
    pub mu: f64,
    /// Energy held fixed along the orbit.
    pub energy: f64,
    /// Index of the half-period axis crossing.
    pub crossing_index: usize,
    /// Initial-abscissa interval with a sign change of the residual.
    pub bracket: (f64, f64),
    pub branch: MomentumBranch,
    pub frame: Frame,
    pub options: IntegrateOptions,
}

/// A symmetric periodic orbit at `mu > 0` (or exactly 0), certified by
/// closure, energy drift and integer winding data.
#[derive(Debug, Clone)]
pub struct ContinuedOrbit {
    /// Initial abscissa on the symmetry line (signed).
    pub q0: f64,
    pub period: f64,
    pub energy: f64,
    pub action: f64,
    /// Rotation number of the momentum over one period.
    pub rot: i64,
    /// Winding number about the heavy primary.
    pub w1: i64,
    /// Winding number about the secondary.
    pub w2: i64,
    /// De Rham generator integral `2 rot - w1 - w2`.
    pub beta0: i64,
    /// Closure defect of the reflection-assembled period: the distance
    /// between the half orbit's endpoint and its own reflection,
    /// `sqrt(2 (p1^2 + q2^2))` at the half-period crossing. Exactly
    /// periodic orbits have zero defect.
    pub closure_gap: f64,
    /// Endpoint mismatch of the re-integrated full period; unlike the
    /// closure defect this inherits the error amplification of close
    /// encounters, so it is reported as a diagnostic.
    pub return_gap: f64,
    /// Maximum energy deviation along the assembled period. The energy
    /// is invariant under the reflection, so this equals the deviation
    /// along the integrated half.
    pub max_energy_drift: f64,
    pub trajectory: Trajectory,
}

impl ContinuedOrbit {
    /// Apoapsis distance from the origin, as tabulated.
    pub fn q0_distance(&self) -> f64 {
        self.q0.abs()
    }

    pub fn energy_drift(&self) -> f64 {
        self.max_energy_drift
    }
}

/// De Rham generator integral from winding data.
pub fn beta0_from_winding(rot: i64, w1: i64, w2: i64) -> i64 {
    2 * rot - w1 - w2
}

/// De Rham generator integral of a continued orbit.
pub fn beta0_integral(orbit: &ContinuedOrbit) -> i64 {
    orbit.beta0
}

fn shooting_t_max(crossing_index: usize) -> f64 {
    5.0 + 4.5 * (crossing_index as f64 + 1.0)
}

/// Residual of the perpendicular-shooting map: `p1` at the `k`-th axis
/// crossing of the trajectory launched from `(q0, 0, 0, p2(q0, c))`.
pub fn shoot(
    q0: f64,
    mu: f64,
    energy: f64,
    crossing_index: usize,
    branch: MomentumBranch,
    frame: Frame,
    options: &IntegrateOptions,
) -> Result<f64> {
    shoot_half(q0, mu, energy, crossing_index, branch, frame, options)
        .map(|traj| traj.end_state().p1)
}

/// The half trajectory behind `shoot`, ending at the `k`-th crossing.
pub fn shoot_half(
    q0: f64,
    mu: f64,
    energy: f64,
    crossing_index: usize,
    branch: MomentumBranch,
    frame: Frame,
    options: &IntegrateOptions,
) -> Result<Trajectory> {
    let params = ModelParams::new(mu, frame)?;
    let p2 = dynamics::p2_from_energy(q0, energy, &params, branch)?;
    let start = PhaseState::new(q0, 0.0, 0.0, p2, 0.0);
    dynamics::integrate(
        &start,
        &params,
        StopCondition::AxisCrossing {
            count: crossing_index,
            t_max: shooting_t_max(crossing_index),
        },
        options,
    )
}

/// Solve the shooting problem on its bracket and assemble the certified
/// periodic orbit.
pub fn find_orbit(problem: &ShootingProblem) -> Result<ContinuedOrbit> {
    let residual = |q0: f64| {
        shoot(
            q0,
            problem.mu,
            problem.energy,
            problem.crossing_index,
            problem.branch,
            problem.frame,
            &problem.options,
        )
    };
    let scale = problem.bracket.0.abs().max(problem.bracket.1.abs()).max(1.0);
    let q0 = rootfind::illinois(
        residual,
        problem.bracket.0,
        problem.bracket.1,
        1e-13 * scale,
        1e-11,
    )?;
    let r = residual(q0)?;
    if r.abs() > 1e-10 {
        return Err(Error::NoConvergence(format!(
            "shooting residual {r:.3e} at q0 = {q0}"
        )));
    }
    build_orbit(q0, problem)
}

/// Integrate the full period of a solved orbit and attach certificates.
///
/// Through a deep close encounter the shooting residual carries an
/// integration noise floor that limits the achievable closure; if the
/// first assembly misses the closure bar, the root is re-polished and
/// re-integrated once at a tighter tolerance.
/// Assemble and certify the orbit, retrying at tighter integrator
/// tolerances (with a root re-polish) while the closure certificate
/// misses its bar; the best assembly is kept.
fn build_orbit(q0: f64, problem: &ShootingProblem) -> Result<ContinuedOrbit> {
    build_orbit_spanning(q0, problem, false)
}

/// As `build_orbit`; with `full_period_return` the shot crossing is the
/// return to the initial perpendicular point after one full period
/// (used at the hairpin collision angle, where the half-period apex
/// grazes the secondary too closely to shoot at directly).
fn build_orbit_spanning(
    q0: f64,
    problem: &ShootingProblem,
    full_period_return: bool,
) -> Result<ContinuedOrbit> {
    let mut best: Option<ContinuedOrbit> = None;
    let mut opts = problem.options;
    let mut q0_cur = q0;
    let mut last_err: Option<Error> = None;
    for attempt in 0..3 {
        if attempt > 0 {
            opts = IntegrateOptions {
                rtol: (opts.rtol * 0.1).max(1e-14),
                atol: (opts.atol * 0.1).max(1e-14),
                ..opts
            };
            q0_cur = polish_root(q0_cur, problem, &opts).unwrap_or(q0_cur);
        }
        match build_orbit_with(q0_cur, problem, &opts, full_period_return) {
            Ok(orbit) => {
                let better = best.as_ref().is_none_or(|b| orbit.closure_gap < b.closure_gap);
                if better {
                    best = Some(orbit);
                }
                if best.as_ref().is_some_and(|b| b.closure_gap <= 1e-8) {
                    break;
                }
            }
            Err(e) => last_err = Some(e),
        }
    }
    best.ok_or_else(|| {
        last_err.unwrap_or_else(|| Error::NoConvergence("orbit assembly failed".into()))
    })
}

fn build_orbit_with(
    q0: f64,
    problem: &ShootingProblem,
    options: &IntegrateOptions,
    full_period_return: bool,
) -> Result<ContinuedOrbit> {
    let params = ModelParams::new(problem.mu, problem.frame)?;
    let half = shoot_half(
        q0,
        problem.mu,
        problem.energy,
        problem.crossing_index,
        problem.branch,
        problem.frame,
        options,
    )?;
    if full_period_return {
        // The shot trajectory already spans one full period; both the
        // closure defect and the return mismatch are the same seam.
        let end = half.end_state();
        let gap = state_gap(&half.start_state(), &end);
        let action = half_orbit_action_doubled(&half) / 2.0;
        let (rot, w1, w2) = winding_data(&half, &params)?;
        let max_energy_drift = half.energy_drift();
        return Ok(ContinuedOrbit {
            q0,
            period: half.t_end(),
            energy: problem.energy,
            action,
            rot,
            w1,
            w2,
            beta0: beta0_from_winding(rot, w1, w2),
            closure_gap: gap,
            return_gap: gap,
            max_energy_drift,
            trajectory: half,
        });
    }
    let period = 2.0 * half.t_end();
    let start = half.start_state();
    // Seam defect of the reflection assembly: the half ends on the
    // symmetry line with p1 = 0 exactly when the full orbit closes.
    let end = half.end_state();
    let seam = (2.0 * (end.p1 * end.p1 + end.q2 * end.q2)).sqrt();
    let full = dynamics::integrate(&start, &params, StopCondition::TimeEnd(period), options)?;
    let return_gap = state_gap(&full.start_state(), &full.end_state());
    // The action over the reflection-invariant integrand is twice the
    // half-orbit integral; the half ends exactly on the symmetry line,
    // so this stays accurate even when the re-integrated full period
    // only closes to the deep-encounter noise floor.
    let action = half_orbit_action_doubled(&half);
    let (rot, w1, w2) = winding_data(&full, &params)?;
    Ok(ContinuedOrbit {
        q0,
        period,
        energy: problem.energy,
        action,
        rot,
        w1,
        w2,
        beta0: beta0_from_winding(rot, w1, w2),
        closure_gap: seam,
        return_gap,
        max_energy_drift: half.energy_drift(),
        trajectory: full,
    })
}

/// A few finite-difference secant steps on the shooting residual,
/// keeping the best iterate; stops at the evaluation noise floor.
fn polish_root(q0: f64, problem: &ShootingProblem, options: &IntegrateOptions) -> Result<f64> {
    let residual = |x: f64| {
        shoot(
            x,
            problem.mu,
            problem.energy,
            problem.crossing_index,
            problem.branch,
            problem.frame,
            options,
        )
    };
    let scale = q0.abs().max(1.0);
    let mut best = (q0, residual(q0)?);
    for _ in 0..4 {
        if best.1.abs() <= 1e-12 {
            break;
        }
        let dx = 1e-9 * scale;
        let slope = (residual(best.0 + dx)? - best.1) / dx;
        if slope == 0.0 || !slope.is_finite() {
            break;
        }
        let next = best.0 - best.1 / slope;
        let r_next = residual(next)?;
        if r_next.abs() < best.1.abs() {
            best = (next, r_next);
        } else {
            break;
        }
    }
    Ok(best.0)
}

fn state_gap(a: &PhaseState, b: &PhaseState) -> f64 {
    ((b.q1 - a.q1).powi(2) + (b.q2 - a.q2).powi(2) + (b.p1 - a.p1).powi(2) + (b.p2 - a.p2).powi(2))
        .sqrt()
}

const GL5_NODES: [f64; 5] = [
    -0.906179845938664,
    -0.5384693101056831,
    0.0,
    0.5384693101056831,
    0.906179845938664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.23692688505618908,
    0.47862867049936647,
    0.5688888888888889,
    0.47862867049936647,
    0.23692688505618908,
];

fn action_integrand(s: &PhaseState) -> f64 {
    s.p1 * s.p1 + s.p2 * s.p2 + s.p1 * s.q2 - s.p2 * s.q1
}

/// Quadrature of `|p|^2 + L` over the covered span of a trajectory,
/// Gauss-Legendre per dense segment.
fn quadrature_action(traj: &Trajectory) -> f64 {
    let mut total = 0.0;
    for (t_lo, t_hi) in traj.segment_spans() {
        let half = 0.5 * (t_hi - t_lo);
        if half == 0.0 {
            continue;
        }
        let mid = 0.5 * (t_hi + t_lo);
        let mut acc = 0.0;
        for (x, w) in GL5_NODES.iter().zip(GL5_WEIGHTS) {
            let state = traj.state_at(mid + half * x).expect("inside span");
            acc += w * action_integrand(&state);
        }
        total += acc * half;
    }
    total
}

/// Symplectic action `int (|p|^2 + L) dt` of a closed trajectory.
pub fn orbit_action(trajectory: &Trajectory) -> Result<f64> {
    let gap = state_gap(&trajectory.start_state(), &trajectory.end_state());
    if gap > 1e-8 {
        return Err(Error::OpenTrajectory { gap, tol: 1e-8 });
    }
    Ok(quadrature_action(trajectory))
}

/// Action of a half orbit doubled; the integrand is invariant under the
/// reflection symmetry, so this equals the closed-orbit action when the
/// half spans exactly half a period.
pub fn half_orbit_action_doubled(half: &Trajectory) -> f64 {
    2.0 * quadrature_action(half)
}

/// Signed angle between two nonzero planar vectors, in `(-pi, pi]`.
fn angle_delta(u: [f64; 2], v: [f64; 2]) -> f64 {
    (u[0] * v[1] - u[1] * v[0]).atan2(u[0] * v[0] + u[1] * v[1])
}

/// Continuous-angle winding data of a closed trajectory:
/// `(rot, w1, w2)`.
///
/// `rot` tracks the fiber angle of the energy level set, i.e. the
/// direction of the kinetic velocity `p + A(q) = (p1 + q2, p2 - q1)`.
/// On the level set the admissible momenta at a fixed position form a
/// circle centered at `-A(q)`, so the loop class generated by the
/// momentum fiber is measured by this shifted vector, not by `p`
/// itself. `w1` and `w2` track the position angles about the two
/// primaries.
///
/// Angle increments are accumulated with adaptive refinement so that no
/// step exceeds 0.5 rad; the totals must land on integer multiples of
/// `2 pi` within 1e-6.
pub fn winding_data(trajectory: &Trajectory, params: &ModelParams) -> Result<(i64, i64, i64)> {
    let (m1, m2) = params.primary_abscissae();
    let vectors =
        |s: &PhaseState| [[s.p1 + s.q2, s.p2 - s.q1], [s.q1 - m1, s.q2], [s.q1 - m2, s.q2]];
    let mut totals = [0.0f64; 3];

    for (t_lo, t_hi) in trajectory.segment_spans() {
        if t_lo == t_hi {
            continue;
        }
        let mut stack = vec![(t_lo, t_hi)];
        while let Some((a, b)) = stack.pop() {
            let va = vectors(&trajectory.state_at(a).expect("inside span"));
            let vb = vectors(&trajectory.state_at(b).expect("inside span"));
            let mut worst = 0.0f64;
            let mut deltas = [0.0f64; 3];
            for (d, (u, v)) in deltas.iter_mut().zip(va.iter().zip(&vb)) {
                *d = angle_delta(*u, *v);
                worst = worst.max(d.abs());
            }
            if worst > 0.5 {
                if (b - a).abs() < 1e-12 {
                    return Err(Error::AngleResolution { delta: worst });
                }
                let mid = 0.5 * (a + b);
                stack.push((mid, b));
                stack.push((a, mid));
            } else {
                for (t, d) in totals.iter_mut().zip(&deltas) {
                    *t += d;
                }
            }
        }
    }

    let mut out = [0i64; 3];
    for (o, t) in out.iter_mut().zip(&totals) {
        let w = t / (2.0 * PI);
        let n = w.round();
        if (w - n).abs() > 1e-6 {
            return Err(Error::NoConvergence(format!(
                "winding {w} is not an integer within 1e-6"
            )));
        }
        *o = n as i64;
    }
    Ok((out[0], out[1], out[2]))
}

/// Signed initial abscissa and momentum branch of a generating arc's
/// apocenter start, measured from the heavy primary of the given frame.
/// The secondary's phase puts the apocenter on the negative side for odd
/// revolution counts.
pub fn generating_start(arc: &GeneratingArc, params: &ModelParams) -> (f64, MomentumBranch) {
    let sign = if arc.revs_m2 % 2 == 0 { 1.0 } else { -1.0 };
    let (m1, _) = params.primary_abscissae();
    let x0 = m1 + sign * arc.q0();
    (x0, MomentumBranch::direct_from(x0))
}

/// Half of the generating orbit at `mu = 0`: apocenter to collision,
/// which is a smooth piece of the rotating Kepler flow.
pub fn generating_half_trajectory(
    arc: &GeneratingArc,
    frame: Frame,
    options: &IntegrateOptions,
) -> Result<Trajectory> {
    let params = ModelParams::new(0.0, frame)?;
    let (x0, branch) = generating_start(arc, &params);
    let p2 = dynamics::p2_from_energy(x0, arc.h0, &params, branch)?;
    let start = PhaseState::new(x0, 0.0, 0.0, p2, 0.0);
    dynamics::integrate(&start, &params, StopCondition::TimeEnd(arc.tau / 2.0), options)
}

/// Action of the generating orbit by flow quadrature (doubled half),
/// an independent check of the closed-form arc action.
pub fn generating_action_by_flow(arc: &GeneratingArc, options: &IntegrateOptions) -> Result<f64> {
    let half = generating_half_trajectory(arc, Frame::M1Centered, options)?;
    Ok(half_orbit_action_doubled(&half))
}

/// Number of the axis crossing at which the half period ends, counted on
/// the `mu = 0` generating orbit: interior sign changes of `q2` over the
/// open half period, plus one for the collision endpoint.
pub fn generating_crossing_index(arc: &GeneratingArc, options: &IntegrateOptions) -> Result<usize> {
    let half = generating_half_trajectory(arc, Frame::M1Centered, options)?;
    let t_end = half.t_end();
    let t_skip = t_end * 1e-9;
    let t_stop = t_end * (1.0 - 1e-6);
    let mut interior = 0usize;
    let mut last_sign = 0.0f64;
    for (t_lo, t_hi) in half.segment_spans() {
        const M: usize = 8;
        for m in 0..=M {
            let t = t_lo + (t_hi - t_lo) * m as f64 / M as f64;
            if t <= t_skip || t >= t_stop {
                continue;
            }
            let q2 = half.state_at(t).expect("inside span").q2;
            let sign = if q2 == 0.0 { 0.0 } else { q2.signum() };
            if sign != 0.0 {
                if last_sign != 0.0 && sign != last_sign {
                    interior += 1;
                }
                last_sign = sign;
            }
        }
    }
    Ok(interior + 1)
}

/// One `(arc, mu)` result row of a continuation sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub q0_abscissa: f64,
    pub q0_distance: f64,
    pub action: f64,
    pub rot: i64,
    pub w1: i64,
    pub w2: i64,
    pub beta0: i64,
    pub closure_gap: f64,
    pub return_gap: f64,
    pub energy_drift: f64,
    pub min_secondary_distance: f64,
}

impl SweepRow {
    fn from_orbit(orbit: &ContinuedOrbit) -> Self {
        SweepRow {
            q0_abscissa: orbit.q0,
            q0_distance: orbit.q0_distance(),
            action: orbit.action,
            rot: orbit.rot,
            w1: orbit.w1,
            w2: orbit.w2,
            beta0: orbit.beta0,
            closure_gap: orbit.closure_gap,
            return_gap: orbit.return_gap,
            energy_drift: orbit.energy_drift(),
            min_secondary_distance: orbit.trajectory.stats.min_secondary_distance,
        }
    }
}

/// Continuation results of one arc over the requested mass ratios; a
/// `None` cell is reported as "x" in table output.
#[derive(Debug)]
pub struct ArcSweep {
    pub arc: GeneratingArc,
    pub crossing_index: usize,
    pub cells: Vec<(f64, Option<SweepRow>)>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub frame: Frame,
    /// Target mass ratios, ascending.
    pub mus: Vec<f64>,
    pub integrate: IntegrateOptions,
    pub parallel: bool,
}

impl Default for SweepOptions {
    fn default() -> Self {
        // The barycentric frame is the one whose continued orbits match
        // the reference tables; the perturbative frame with its tilt
        // term describes a measurably different continuation.
        SweepOptions {
            frame: Frame::Barycentric,
            mus: Vec::new(),
            integrate: IntegrateOptions::default(),
            parallel: true,
        }
    }
}

/// Continue every arc over the mass-ratio list by natural-parameter
/// continuation: each solved ratio seeds the bracket of the next, with
/// step halving down to 1e-6 before a cell is declared lost. Results are
/// merged in input order; arcs are processed concurrently.
pub fn continuation_sweep(arcs: &[GeneratingArc], options: &SweepOptions) -> Vec<ArcSweep> {
    if !options.parallel || arcs.len() <= 1 {
        return arcs.iter().map(|arc| sweep_one(arc, options)).collect();
    }
    let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let next_job = std::sync::atomic::AtomicUsize::new(0);
    let mut slots: Vec<std::sync::Mutex<Option<ArcSweep>>> =
        (0..arcs.len()).map(|_| std::sync::Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads.min(arcs.len()) {
            scope.spawn(|| loop {
                let idx = next_job.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if idx >= arcs.len() {
                    break;
                }
                let result = sweep_one(&arcs[idx], options);
                *slots[idx].lock().unwrap() = Some(result);
            });
        }
    });
    slots
        .iter_mut()
        .map(|s| s.get_mut().unwrap().take().expect("sweep slot filled"))
        .collect()
}

fn m1_abscissa(mu: f64, frame: Frame) -> f64 {
    match frame {
        Frame::M1Centered => 0.0,
        Frame::Barycentric => -mu,
    }
}

fn sweep_one(arc: &GeneratingArc, options: &SweepOptions) -> ArcSweep {
    let mut notes = Vec::new();
    let crossing_index = match generating_crossing_index(arc, &options.integrate) {
        Ok(k) => k,
        Err(e) => {
            notes.push(format!("crossing count failed: {e}"));
            return ArcSweep {
                arc: arc.clone(),
                crossing_index: 0,
                cells: options.mus.iter().map(|&mu| (mu, None)).collect(),
                notes,
            };
        }
    };
    if crate::arcs::exclude_degenerate(arc) {
        notes.push(format!(
            "degenerate arc (theta = {:.6}); continuation attempted anyway",
            arc.ellipse.theta
        ));
    }

    let sign = if arc.revs_m2 % 2 == 0 { 1.0 } else { -1.0 };
    let branch = MomentumBranch::direct_from(sign);
    let theta = arc.ellipse.theta;
    let i = arc.revs_m2 as i64;
    // Winding signatures that identify the continuation branch among
    // the symmetric orbits born in the close encounter: below the
    // perpendicular angle the orbit passes between the primaries, above
    // it an extra loop forms around the secondary. At the boundary angle
    // itself either shape qualifies.
    let acute = (-i, -i, -i + 1);
    let obtuse = (-i - 1, -i, -i - 1);
    // At the perpendicular collision angle the deflection is a hairpin
    // around the secondary, which tightens as the mass ratio falls: the
    // half-period apex passes too close to shoot at directly. The shot
    // targets the full-period return crossing instead, with a residual
    // acceptance relaxed to the apex noise floor; candidate roots must
    // produce integer windings of either shape over the returned span,
    // which is what separates the periodic orbit from pseudo-roots of
    // the return map.
    let hairpin = (theta - PI / 2.0).abs() <= 1e-9;
    let crossing_index = if hairpin { 2 * crossing_index } else { crossing_index };
    let residual_tol = if hairpin { 1e-3 } else { 3e-8 };
    let expected_winding: Vec<(i64, i64, i64)> = if hairpin {
        vec![acute, obtuse]
    } else if theta < PI / 2.0 {
        vec![acute]
    } else {
        vec![obtuse]
    };

    let mut cells = Vec::with_capacity(options.mus.len());
    // Natural-parameter state, tracked relative to the heavy primary so
    // the barycentric frame shift does not pollute the prediction.
    let mut mu_prev = 0.0f64;
    let mut rel_prev = sign * arc.q0();
    let mut slope = 0.0f64;

    for &target in &options.mus {
        let mut solved: Option<(f64, f64)> = None; // (q0 rel M1, slope)
        let mut mu_cur = mu_prev;
        let mut rel_cur = rel_prev;
        let mut slope_cur = slope;
        // The first rung stays deep in the small-mass-ratio regime,
        // where the continuation root is the only symmetric orbit inside
        // its O(mu) trust window and the winding signature can confirm
        // the branch before the ladder climbs.
        let mut step = if mu_prev == 0.0 {
            (target - mu_cur).min(3e-4).max(1e-7)
        } else {
            (target - mu_cur).max(1e-7)
        };
        let mut failures = 0usize;
        while mu_cur < target || solved.is_none() {
            let mu_next = (mu_cur + step).min(target);
            let d_mu = mu_next - mu_cur;
            let first_rung = mu_cur == 0.0;
            let center = m1_abscissa(mu_next, options.frame) + rel_cur + slope_cur * d_mu;
            // Trust window: wide enough for the O(mu) root shift on the
            // first rung and for prediction error afterwards, but short
            // of neighboring orbit families.
            let scale = rel_cur.abs().max(1.0);
            let width = if first_rung && hairpin {
                (4.0 * mu_next * scale).clamp(1e-7, 0.08 * scale)
            } else if first_rung {
                (32.0 * mu_next * scale).clamp(1e-7, 0.08 * scale)
            } else {
                (6.0 * d_mu * slope_cur.abs().max(0.5)).clamp(1e-6 * scale, 0.05 * scale)
            };
            let want: &[(i64, i64, i64)] =
                if first_rung || hairpin { &expected_winding } else { &[] };
            match solve_q0(
                arc.h0,
                center,
                width,
                mu_next,
                crossing_index,
                branch,
                want,
                residual_tol,
                hairpin,
                options,
            ) {
                Ok(q0) => {
                    let rel_new = q0 - m1_abscissa(mu_next, options.frame);
                    if d_mu > 0.0 {
                        slope_cur = (rel_new - rel_cur) / d_mu;
                    }
                    rel_cur = rel_new;
                    mu_cur = mu_next;
                    if mu_cur >= target {
                        solved = Some((rel_cur, slope_cur));
                        break;
                    }
                    step = (target - mu_cur).min(step * 2.0);
                }
                Err(e) => {
                    failures += 1;
                    step /= 2.0;
                    if step.abs() < 1e-6 {
                        notes.push(format!(
                            "mu = {target}: lost after {failures} refinements ({e})"
                        ));
                        break;
                    }
                }
            }
        }
        let cell = solved.and_then(|(rel, slope_at)| {
            let q0 = m1_abscissa(target, options.frame) + rel;
            let problem = ShootingProblem {
                mu: target,
                energy: arc.h0,
                crossing_index,
                bracket: (q0, q0),
                branch,
                frame: options.frame,
                options: options.integrate,
            };
            match build_orbit_spanning(q0, &problem, hairpin) {
                Ok(orbit) => {
                    mu_prev = target;
                    rel_prev = rel;
                    slope = slope_at;
                    Some(SweepRow::from_orbit(&orbit))
                }
                Err(e) => {
                    notes.push(format!("mu = {target}: orbit assembly failed ({e})"));
                    None
                }
            }
        });
        cells.push((target, cell));
    }

    ArcSweep { arc: arc.clone(), crossing_index, cells, notes }
}

/// Locate and solve the shooting root inside a trust window.
///
/// Away from the root the residual is dominated by the undeflected flow
/// and does not change sign; the sign changes live in a narrow band
/// around the initial abscissa whose trajectory meets the secondary, and
/// several symmetric orbits can coexist there. The search zooms toward
/// the minimizer of the closest-approach distance until sign changes
/// appear between grid-adjacent probes, then solves every candidate
/// bracket; when `expected_winding` is given, the root whose orbit
/// carries that signature is returned.
#[allow(clippy::too_many_arguments)]
fn solve_q0(
    energy: f64,
    center: f64,
    width: f64,
    mu: f64,
    crossing_index: usize,
    branch: MomentumBranch,
    expected_winding: &[(i64, i64, i64)],
    residual_tol: f64,
    full_span: bool,
    options: &SweepOptions,
) -> Result<f64> {
    let probe = |q0: f64| -> Result<(f64, f64)> {
        let half =
            shoot_half(q0, mu, energy, crossing_index, branch, options.frame, &options.integrate)?;
        Ok((half.end_state().p1, half.stats.min_secondary_distance))
    };
    let residual = |q0: f64| probe(q0).map(|(r, _)| r);
    let scale = center.abs().max(1.0);

    // Worklist of intervals, nearest to the predicted center first;
    // brackets found inside an interval are solved, and when the root
    // fails the winding test the bracket is re-queued for subdivision so
    // sibling roots hiding behind the same sign change get separated.
    let mut worklist: Vec<(f64, f64)> = vec![(center - width, center + width)];
    let mut checked: Vec<f64> = Vec::new();
    let mut last_err: Option<Error> = None;
    let mut fallback: Option<(f64, f64)> = None; // (q0, |q0 - center|)
    let mut pops = 0usize;
    while !worklist.is_empty() && pops < 48 {
        let pos = worklist
            .iter()
            .enumerate()
            .min_by(|a, b| {
                let da = (0.5 * (a.1 .0 + a.1 .1) - center).abs();
                let db = (0.5 * (b.1 .0 + b.1 .1) - center).abs();
                da.partial_cmp(&db).unwrap()
            })
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi) = worklist.swap_remove(pos);
        pops += 1;
        if hi - lo < 1e-13 * scale {
            continue;
        }
        const N: usize = 12;
        // Grid probes; failures (collision guard) break adjacency.
        let mut samples: Vec<Option<(f64, f64, f64)>> = Vec::with_capacity(N + 1);
        for m in 0..=N {
            let x = lo + (hi - lo) * m as f64 / N as f64;
            match probe(x) {
                Ok((r, d)) => samples.push(Some((x, r, d))),
                Err(e) => {
                    last_err = Some(e);
                    samples.push(None);
                }
            }
        }
        let mut brackets = collect_brackets(&samples);
        if brackets.is_empty() {
            // The sign changes live near the abscissa whose trajectory
            // meets the secondary, at an offset scale set by the mass
            // ratio; probe geometrically around the deepest encounter so
            // every scale between grid spacing and machine precision is
            // straddled by consecutive probes.
            if let Some(&(x_min, _, _)) =
                samples.iter().flatten().min_by(|a, b| a.2.partial_cmp(&b.2).unwrap())
            {
                let mut geo: Vec<Option<(f64, f64, f64)>> = Vec::with_capacity(41);
                let mut xs: Vec<f64> = Vec::with_capacity(41);
                for j in 0..20 {
                    let offset = (hi - lo) * 0.5f64.powi(j + 1);
                    xs.push(x_min - offset);
                    xs.push(x_min + offset);
                }
                xs.push(x_min);
                xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
                for x in xs {
                    match probe(x) {
                        Ok((r, d)) => geo.push(Some((x, r, d))),
                        Err(e) => {
                            last_err = Some(e);
                            geo.push(None);
                        }
                    }
                }
                brackets = collect_brackets(&geo);
            }
        }
        // Near roots first keeps the continuation branch when no winding
        // signature is requested.
        brackets.sort_by(|a, b| {
            let da = (0.5 * (a.0 + a.1) - center).abs();
            let db = (0.5 * (b.0 + b.1) - center).abs();
            da.partial_cmp(&db).unwrap()
        });
        if brackets.is_empty() && samples.iter().all(|s| s.is_none()) {
            return Err(last_err.unwrap_or_else(|| {
                Error::NoBracket(format!("no valid shooting probes near q0 = {center}"))
            }));
        }
        // Sub-grid roots hide near close encounters, where the approach
        // distance dips; queue zooms around its local minima so they are
        // examined even when a coarser bracket exists farther out.
        let w = (hi - lo) / 4.0;
        if w >= 1e-13 * scale {
            let valid: Vec<(f64, f64, f64)> = samples.iter().flatten().copied().collect();
            let mut minima: Vec<f64> = Vec::new();
            for (i, &(x, _, d)) in valid.iter().enumerate() {
                let left = i.checked_sub(1).map(|j| valid[j].2);
                let right = valid.get(i + 1).map(|s| s.2);
                if left.is_none_or(|v| d <= v) && right.is_none_or(|v| d <= v) {
                    minima.push(x);
                }
            }
            minima.sort_by(|a, b| (a - center).abs().partial_cmp(&(b - center).abs()).unwrap());
            for x_min in minima.into_iter().take(3) {
                worklist.push((x_min - w / 2.0, x_min + w / 2.0));
            }
        }
        for &(blo, bhi) in &brackets {
            let q0 = match rootfind::illinois(residual, blo, bhi, 1e-14 * scale, 1e-12) {
                Ok(q0) => q0,
                Err(e) => {
                    last_err = Some(e);
                    continue;
                }
            };
            // Residual evaluations through a deep encounter carry an
            // integration noise floor well above 1e-10; a root localized
            // to the bracket with a small reading is accepted and the
            // closure certificate downstream arbitrates.
            match residual(q0) {
                Ok(r) if r.abs() <= residual_tol => {}
                Ok(_) | Err(_) => continue,
            }
            if expected_winding.is_empty() {
                return Ok(q0);
            }
            if !checked.iter().any(|&c| (c - q0).abs() <= 1e-10 * scale) {
                checked.push(q0);
                let d = (q0 - center).abs();
                if fallback.is_none_or(|(_, fd)| d < fd) {
                    fallback = Some((q0, d));
                }
                if orbit_winding_at(q0, energy, mu, crossing_index, branch, full_span, options)
                    .is_ok_and(|got| expected_winding.contains(&got))
                {
                    return Ok(q0);
                }
            }
            // The same bracket may hide further roots beside this one.
            if bhi - blo > 1e-12 * scale {
                worklist.push((blo, bhi));
            }
        }
    }
    if let Some((q0, _)) = fallback {
        // No root carried the expected signature; keep the nearest one
        // rather than losing the cell.
        return Ok(q0);
    }
    Err(last_err.unwrap_or_else(|| {
        Error::NoBracket(format!("no residual sign change near q0 = {center} at mu = {mu}"))
    }))
}

/// Sign-change intervals between grid-adjacent valid probes.
fn collect_brackets(samples: &[Option<(f64, f64, f64)>]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for w in samples.windows(2) {
        if let (Some((xa, ra, _)), Some((xb, rb, _))) = (w[0], w[1]) {
            if ra.signum() != rb.signum() {
                out.push((xa, xb));
            }
        }
    }
    out
}

/// Winding signature of the solved orbit at one abscissa.
fn orbit_winding_at(
    q0: f64,
    energy: f64,
    mu: f64,
    crossing_index: usize,
    branch: MomentumBranch,
    full_span: bool,
    options: &SweepOptions,
) -> Result<(i64, i64, i64)> {
    let params = ModelParams::new(mu, options.frame)?;
    let half =
        shoot_half(q0, mu, energy, crossing_index, branch, options.frame, &options.integrate)?;
    if full_span {
        // The shot already spans one full period.
        return winding_data(&half, &params);
    }
    let full = dynamics::integrate(
        &half.start_state(),
        &params,
        StopCondition::TimeEnd(2.0 * half.t_end()),
        &options.integrate,
    )?;
    winding_data(&full, &params)
}
