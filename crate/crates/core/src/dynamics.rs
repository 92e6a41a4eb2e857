//! Planar rotating-frame Hamiltonian flow for an arbitrary mass ratio:
//! energy, vector field, adaptive integration with dense output, and
//! symmetry-line crossing events.

use crate::dopri5::{self, DenseSegment, State, StepFlow};
use crate::error::{Error, Result};
use std::cell::Cell;
use std::io::Write;

/// Placement of the primaries on the rotating axis.
///
/// `M1Centered` puts the heavy primary at the origin and the secondary
/// at `(1, 0)`; the potential then carries the tilt term `-mu q1` of the
/// perturbative splitting, and at `mu = 0` the flow is exactly the
/// rotating Kepler problem around the origin. `Barycentric` is the
/// textbook frame with primaries at `(-mu, 0)` and `(1 - mu, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    M1Centered,
    Barycentric,
}

impl std::fmt::Display for Frame {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Frame::M1Centered => write!(f, "m1"),
            Frame::Barycentric => write!(f, "barycentric"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Mass ratio in `[0, 1)`.
    pub mu: f64,
    pub frame: Frame,
}

impl ModelParams {
    pub fn new(mu: f64, frame: Frame) -> Result<Self> {
        if !(0.0..1.0).contains(&mu) {
            return Err(Error::Domain(format!("mass ratio {mu} outside [0, 1)")));
        }
        Ok(ModelParams { mu, frame })
    }

    /// Abscissae of the primaries `(M1, M2)` in this frame.
    pub fn primary_abscissae(&self) -> (f64, f64) {
        match self.frame {
            Frame::M1Centered => (0.0, 1.0),
            Frame::Barycentric => (-self.mu, 1.0 - self.mu),
        }
    }
}

/// Rotating-frame phase point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub q1: f64,
    pub q2: f64,
    pub p1: f64,
    pub p2: f64,
    pub t: f64,
}

impl PhaseState {
    pub fn new(q1: f64, q2: f64, p1: f64, p2: f64, t: f64) -> Self {
        PhaseState { q1, q2, p1, p2, t }
    }

    pub(crate) fn from_raw(y: &State, t: f64) -> Self {
        PhaseState { q1: y[0], q2: y[1], p1: y[2], p2: y[3], t }
    }

    pub(crate) fn raw(&self) -> State {
        [self.q1, self.q2, self.p1, self.p2]
    }

    /// Anti-symplectic reflection `(q1, -q2, -p1, p2)`; composing it with
    /// time reversal maps solutions to solutions.
    pub fn rho_reflect(&self) -> Self {
        PhaseState { q1: self.q1, q2: -self.q2, p1: -self.p1, p2: self.p2, t: -self.t }
    }

    pub fn distance_to(&self, x: f64) -> f64 {
        ((self.q1 - x) * (self.q1 - x) + self.q2 * self.q2).sqrt()
    }
}

fn distances(y: &State, params: &ModelParams) -> (f64, f64) {
    let (m1, m2) = params.primary_abscissae();
    let r1 = ((y[0] - m1) * (y[0] - m1) + y[1] * y[1]).sqrt();
    let r2 = ((y[0] - m2) * (y[0] - m2) + y[1] * y[1]).sqrt();
    (r1, r2)
}

fn hamiltonian_raw(y: &State, params: &ModelParams) -> Result<f64> {
    let (r1, r2) = distances(y, params);
    let mu = params.mu;
    if (1.0 - mu > 0.0 && r1 == 0.0) || (mu > 0.0 && r2 == 0.0) {
        return Err(Error::Domain("state at a primary".into()));
    }
    let kinetic = 0.5 * (y[2] * y[2] + y[3] * y[3]);
    let coriolis = y[2] * y[1] - y[3] * y[0];
    let tilt = match params.frame {
        Frame::M1Centered => -mu * y[0],
        Frame::Barycentric => 0.0,
    };
    // Massless potentials contribute nothing even on top of the body.
    let u1 = if 1.0 - mu > 0.0 { -(1.0 - mu) / r1 } else { 0.0 };
    let u2 = if mu > 0.0 { -mu / r2 } else { 0.0 };
    Ok(kinetic + coriolis + u1 + u2 + tilt)
}

/// Energy `H_mu` of a phase point. At `mu = 0` both frames reduce to
/// the rotating Kepler Hamiltonian
/// `|p|^2/2 + p1 q2 - p2 q1 - 1/|q|`.
pub fn hamiltonian(state: &PhaseState, params: &ModelParams) -> Result<f64> {
    hamiltonian_raw(&state.raw(), params)
}

fn vector_field_raw(y: &State, params: &ModelParams) -> Result<State> {
    let (m1, m2) = params.primary_abscissae();
    let mu = params.mu;
    let d1 = [y[0] - m1, y[1]];
    let d2 = [y[0] - m2, y[1]];
    let r1sq = d1[0] * d1[0] + d1[1] * d1[1];
    let r2sq = d2[0] * d2[0] + d2[1] * d2[1];
    if r1sq == 0.0 || (mu > 0.0 && r2sq == 0.0) {
        return Err(Error::Domain("state at a primary".into()));
    }
    let c1 = (1.0 - mu) / (r1sq * r1sq.sqrt());
    let c2 = if mu > 0.0 { mu / (r2sq * r2sq.sqrt()) } else { 0.0 };
    let tilt = match params.frame {
        Frame::M1Centered => mu,
        Frame::Barycentric => 0.0,
    };
    Ok([
        y[2] + y[1],
        y[3] - y[0],
        y[3] - c1 * d1[0] - c2 * d2[0] + tilt,
        -y[2] - c1 * d1[1] - c2 * d2[1],
    ])
}

/// Hamilton's equations `(dH/dp, -dH/dq)` evaluated analytically.
pub fn vector_field(state: &PhaseState, params: &ModelParams) -> Result<PhaseState> {
    let d = vector_field_raw(&state.raw(), params)?;
    Ok(PhaseState { q1: d[0], q2: d[1], p1: d[2], p2: d[3], t: state.t })
}

/// Momentum sign choice when inverting the energy on the symmetry line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentumBranch {
    Plus,
    Minus,
}

impl MomentumBranch {
    /// The branch that starts direct motion from an apocenter at
    /// abscissa `q0` (the smaller-|p2| root on either side of the axis).
    pub fn direct_from(q0: f64) -> Self {
        if q0 >= 0.0 {
            MomentumBranch::Minus
        } else {
            MomentumBranch::Plus
        }
    }
}

/// Solve `H(q0, 0, 0, p2) = c` for `p2`. The quadratic in `p2` gives
/// `q0 +- sqrt(q0^2 + 2 (c - U(q0)))` with `U` the full position-dependent
/// part of the Hamiltonian in the chosen frame; the small root is formed
/// without cancellation.
pub fn p2_from_energy(q0: f64, c: f64, params: &ModelParams, branch: MomentumBranch) -> Result<f64> {
    let probe = [q0, 0.0, 0.0, 0.0];
    let u = hamiltonian_raw(&probe, params)?;
    let disc = q0 * q0 + 2.0 * (c - u);
    if disc < 0.0 {
        return Err(Error::OutsideHillRegion { q0, c, discriminant: disc });
    }
    let sq = disc.sqrt();
    let s = match branch {
        MomentumBranch::Plus => 1.0,
        MomentumBranch::Minus => -1.0,
    };
    // q0 + s*sq cancels when the signs oppose; use the product form there.
    if s * q0 < 0.0 {
        Ok(2.0 * (u - c) / (q0 - s * sq))
    } else {
        Ok(q0 + s * sq)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct IntegrateOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Reject states within this distance of a massive primary.
    pub collision_guard: f64,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            rtol: 1e-12,
            atol: 1e-12,
            max_steps: 20_000_000,
            collision_guard: 1e-8,
        }
    }
}

/// Termination condition of one integration.
#[derive(Debug, Clone, Copy)]
pub enum StopCondition {
    /// Run to a fixed final time.
    TimeEnd(f64),
    /// Stop at the `count`-th transversal crossing of `q2 = 0` (crossings
    /// at the initial instant are ignored); abort at `t_max` if fewer
    /// occur.
    AxisCrossing { count: usize, t_max: f64 },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IntegratorStats {
    pub steps: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub evals: usize,
    /// Closest approach to the secondary seen along the run.
    pub min_secondary_distance: f64,
    /// Closest approach to the heavy primary.
    pub min_primary_distance: f64,
}

/// A dense-output trajectory of the rotating-frame flow.
///
/// Segments cover `[t_start, t_end]`; the final segment may extend past
/// `t_end` when the run stopped on an event inside a step.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub params: ModelParams,
    /// Energy of the initial state; conserved by the flow.
    pub energy: f64,
    pub stats: IntegratorStats,
    segments: Vec<DenseSegment>,
    t_start: f64,
    t_end: f64,
    start: State,
    end: State,
}

impl Trajectory {
    pub fn t_start(&self) -> f64 {
        self.t_start
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn start_state(&self) -> PhaseState {
        PhaseState::from_raw(&self.start, self.t_start)
    }

    pub fn end_state(&self) -> PhaseState {
        PhaseState::from_raw(&self.end, self.t_end)
    }

    /// Dense-output state at any time within the covered span.
    pub fn state_at(&self, t: f64) -> Result<PhaseState> {
        if self.segments.is_empty() {
            return Err(Error::Domain("empty trajectory".into()));
        }
        let t = if (t - self.t_start).abs() < 1e-12 {
            self.t_start
        } else if (t - self.t_end).abs() < 1e-12 {
            self.t_end
        } else {
            t
        };
        let lo = self.t_start.min(self.t_end);
        let hi = self.t_start.max(self.t_end);
        if !(lo - 1e-12..=hi + 1e-12).contains(&t) {
            return Err(Error::Domain(format!(
                "time {t} outside trajectory span [{lo}, {hi}]"
            )));
        }
        // Segments are time-ordered; binary search by start time.
        let idx = self
            .segments
            .partition_point(|s| (s.t_end() - t) * s.h.signum() < 0.0)
            .min(self.segments.len() - 1);
        let seg = &self.segments[idx];
        Ok(PhaseState::from_raw(&seg.eval(t), t))
    }

    /// States at the accepted step endpoints (including both ends).
    pub fn step_states(&self) -> Vec<PhaseState> {
        let mut out = Vec::with_capacity(self.segments.len() + 1);
        out.push(self.start_state());
        for seg in &self.segments {
            let t = if (seg.t_end() - self.t_end) * seg.h.signum() > 0.0 {
                self.t_end
            } else {
                seg.t_end()
            };
            out.push(PhaseState::from_raw(&seg.eval(t), t));
            if t == self.t_end {
                break;
            }
        }
        out
    }

    /// States on a uniform grid of `n + 1` points across the span.
    pub fn sample_uniform(&self, n: usize) -> Result<Vec<PhaseState>> {
        let n = n.max(1);
        (0..=n)
            .map(|k| {
                let t = self.t_start + (self.t_end - self.t_start) * k as f64 / n as f64;
                self.state_at(t)
            })
            .collect()
    }

    /// Maximum deviation of the energy from its initial value, sampled
    /// at several points per accepted step.
    pub fn energy_drift(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for seg in &self.segments {
            for m in 0..=4 {
                let t = seg.t0 + seg.h * m as f64 / 4.0;
                if (t - self.t_end) * seg.h.signum() > 0.0 {
                    break;
                }
                if let Ok(h) = hamiltonian_raw(&seg.eval(t), &self.params) {
                    worst = worst.max((h - self.energy).abs());
                }
            }
        }
        worst
    }

    pub(crate) fn segments(&self) -> &[DenseSegment] {
        &self.segments
    }

    /// Time spans of the accepted steps, clipped to the covered interval.
    pub(crate) fn segment_spans(&self) -> Vec<(f64, f64)> {
        let dir = (self.t_end - self.t_start).signum();
        let mut out = Vec::with_capacity(self.segments.len());
        for seg in &self.segments {
            let mut t_hi = seg.t_end();
            if (t_hi - self.t_end) * dir > 0.0 {
                t_hi = self.t_end;
            }
            out.push((seg.t0, t_hi));
            if t_hi == self.t_end {
                break;
            }
        }
        out
    }

    /// Interface format: CSV columns `t,q1,q2,p1,p2,H` at the accepted
    /// step endpoints, 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "t,q1,q2,p1,p2,H")?;
        for s in self.step_states() {
            let h = hamiltonian(&s, &self.params).unwrap_or(f64::NAN);
            writeln!(
                w,
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                s.t, s.q1, s.q2, s.p1, s.p2, h
            )?;
        }
        Ok(())
    }
}

/// Integrate the flow from `state0` until `stop`.
///
/// Errors near a primary carry the closest-approach distance seen so far.
pub fn integrate(
    state0: &PhaseState,
    params: &ModelParams,
    stop: StopCondition,
    opts: &IntegrateOptions,
) -> Result<Trajectory> {
    let energy = hamiltonian(state0, params)?;
    let y0 = state0.raw();
    let t0 = state0.t;
    let guard = opts.collision_guard;
    let mu = params.mu;

    let min_r1 = Cell::new(f64::INFINITY);
    let min_r2 = Cell::new(f64::INFINITY);
    let t_now = Cell::new(t0);
    let field = |t: f64, y: &State| -> Result<State> {
        let (r1, r2) = distances(y, params);
        min_r1.set(min_r1.get().min(r1));
        min_r2.set(min_r2.get().min(r2));
        t_now.set(t);
        if 1.0 - mu > 0.0 && r1 < guard {
            return Err(Error::CollisionProximity { t, distance: r1, primary: 1 });
        }
        if mu > 0.0 && r2 < guard {
            return Err(Error::CollisionProximity { t, distance: r2, primary: 2 });
        }
        vector_field_raw(y, params)
    };

    let dopts = dopri5::Options {
        rtol: opts.rtol,
        atol: opts.atol,
        h_max: f64::INFINITY,
        max_steps: opts.max_steps,
    };

    let mut segments: Vec<DenseSegment> = Vec::new();
    let outcome = match stop {
        StopCondition::TimeEnd(t_end) => dopri5::integrate(field, t0, y0, t_end, &dopts, |seg| {
            segments.push(seg.clone());
            Ok(StepFlow::Continue)
        }),
        StopCondition::AxisCrossing { count, t_max } => {
            if count == 0 {
                return Err(Error::Domain("crossing count must be >= 1".into()));
            }
            let mut seen = 0usize;
            let mut last_sign = 0.0f64;
            let skip_until = t0 + (t_max - t0).abs() * 1e-9 * (t_max - t0).signum();
            dopri5::integrate(field, t0, y0, t_max, &dopts, |seg| {
                segments.push(seg.clone());
                // Subsample the step for sign changes of q2.
                const M: usize = 8;
                let mut prev_theta = 0.0;
                for m in 0..=M {
                    let theta = m as f64 / M as f64;
                    let t = seg.t0 + seg.h * theta;
                    let q2 = seg.eval_theta(theta)[1];
                    let sign = if q2 == 0.0 { 0.0 } else { q2.signum() };
                    if (t - skip_until) * seg.h.signum() > 0.0 && sign != 0.0 {
                        if last_sign != 0.0 && sign != last_sign {
                            seen += 1;
                            if seen == count {
                                let tc = refine_crossing(seg, prev_theta, theta);
                                return Ok(StepFlow::Stop { t: tc });
                            }
                        }
                        last_sign = sign;
                    }
                    prev_theta = theta;
                }
                Ok(StepFlow::Continue)
            })
            .and_then(|out| {
                if seen >= count {
                    Ok(out)
                } else {
                    Err(Error::CrossingNotFound { wanted: count, found: seen })
                }
            })
        }
    };

    let outcome = outcome.map_err(|e| match e {
        Error::StepUnderflow { t, .. } => {
            Error::StepUnderflow { t, closest: min_r1.get().min(min_r2.get()) }
        }
        other => other,
    })?;

    Ok(Trajectory {
        params: *params,
        energy,
        stats: IntegratorStats {
            steps: outcome.stats.steps,
            accepted: outcome.stats.accepted,
            rejected: outcome.stats.rejected,
            evals: outcome.stats.evals,
            min_secondary_distance: min_r2.get(),
            min_primary_distance: min_r1.get(),
        },
        segments,
        t_start: t0,
        t_end: outcome.t_end,
        start: y0,
        end: outcome.y_end,
    })
}

/// Refinement of a `q2 = 0` crossing inside one dense segment:
/// Newton on the interpolant, safeguarded by bisection.
fn refine_crossing(seg: &DenseSegment, mut lo: f64, mut hi: f64) -> f64 {
    let f = |theta: f64| seg.eval_theta(theta)[1];
    let mut flo = f(lo);
    if flo == 0.0 {
        return seg.t0 + seg.h * lo;
    }
    let mut theta = 0.5 * (lo + hi);
    for _ in 0..80 {
        let ft = f(theta);
        if ft == 0.0 {
            break;
        }
        if ft.signum() == flo.signum() {
            lo = theta;
            flo = ft;
        } else {
            hi = theta;
        }
        let slope = seg.derivative_theta(theta)[1] * seg.h;
        let newton = theta - ft / slope;
        theta = if slope != 0.0 && newton > lo.min(hi) && newton < lo.max(hi) {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (hi - lo).abs() < 1e-16 {
            break;
        }
    }
    seg.t0 + seg.h * theta
}

/// The `k`-th transversal crossing of the symmetry line `q2 = 0` along a
/// trajectory, refined on the dense output to `|q2| <= 1e-12`.
pub fn find_crossing(trajectory: &Trajectory, k: usize) -> Result<(PhaseState, f64)> {
    if k == 0 {
        return Err(Error::Domain("crossing index must be >= 1".into()));
    }
    let mut seen = 0usize;
    let mut last_sign = 0.0f64;
    let span = (trajectory.t_end - trajectory.t_start).abs();
    let skip_until = trajectory.t_start + span * 1e-9 * (trajectory.t_end - trajectory.t_start).signum();
    for seg in trajectory.segments() {
        const M: usize = 8;
        let mut prev_theta = 0.0;
        for m in 0..=M {
            let theta = m as f64 / M as f64;
            let t = seg.t0 + seg.h * theta;
            if (t - trajectory.t_end) * seg.h.signum() > 1e-14 {
                break;
            }
            let q2 = seg.eval_theta(theta)[1];
            let sign = if q2 == 0.0 { 0.0 } else { q2.signum() };
            if (t - skip_until) * seg.h.signum() > 0.0 && sign != 0.0 {
                if last_sign != 0.0 && sign != last_sign {
                    seen += 1;
                    if seen == k {
                        let tc = refine_crossing(seg, prev_theta, theta);
                        let state = PhaseState::from_raw(&seg.eval(tc), tc);
                        debug_assert!(state.q2.abs() <= 1e-12);
                        return Ok((state, tc));
                    }
                }
                last_sign = sign;
            }
            prev_theta = theta;
        }
    }
    Err(Error::CrossingNotFound { wanted: k, found: seen })
}
