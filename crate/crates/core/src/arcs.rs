//! Construction of generating orbits: timing-condition solves, actions,
//! and one-parameter arc sequences.
//!
//! A generating orbit here is a single outgoing arc, repeated
//! periodically, whose supporting ellipse meets the unit circle at polar
//! angle `theta` while the secondary completes `I` revolutions. The
//! timing condition couples `tau` to `I` and `theta`; solving it for the
//! semi-major axis pins the arc completely, and its symplectic action
//! follows in closed form.

use crate::error::{Error, Result};
use crate::kepler::{self, EllipseParams, Rotation};
use crate::lambert::{self, ArcDirection};
use crate::rootfind;
use std::f64::consts::PI;
use std::ops::RangeInclusive;

/// A fully resolved second-species arc.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratingArc {
    pub ellipse: EllipseParams,
    /// Revolutions `I >= 1` of the secondary about the primary per arc.
    pub revs_m2: u32,
    /// Revolutions `J >= 0` of the small body about the primary per arc.
    pub revs_m3: u32,
    /// Elapsed time of the arc.
    pub tau: f64,
    /// Duration of the arc in Levi-Civita regularized time.
    pub sigma: f64,
    /// Rotating-frame energy `H_0`.
    pub h0: f64,
    /// Symplectic action of the repeated-arc orbit over one period.
    pub action: f64,
}

impl GeneratingArc {
    /// Apoapsis distance from the origin, the `q0` table column.
    pub fn q0(&self) -> f64 {
        self.ellipse.apocenter()
    }

    /// Kepler energy `H_fix = -1/(2a)` of the supporting ellipse.
    pub fn kepler_energy(&self) -> f64 {
        -1.0 / (2.0 * self.ellipse.a)
    }

    /// Angular momentum `L = -eps' sqrt(a (1 - eps^2))`; zero for the
    /// rectilinear `theta = 0` arc.
    pub fn angular_momentum(&self) -> f64 {
        let e = &self.ellipse;
        -e.rotation.sign() * (e.a * (1.0 - e.eps * e.eps)).max(0.0).sqrt()
    }

    /// `tau` minus the timing target `2 pi I + 2 eps' theta` (suitably
    /// branched for retrograde arcs).
    pub fn timing_residual(&self) -> f64 {
        self.tau - timing_target(self.ellipse.theta, self.revs_m2, self.ellipse.rotation)
    }

    /// `action - (tau (2 H_fix + L) + 8 sigma)`; zero up to rounding.
    pub fn action_identity_residual(&self) -> f64 {
        self.action
            - (self.tau * (2.0 * self.kepler_energy() + self.angular_momentum())
                + 8.0 * self.sigma)
    }
}

/// Elapsed time required by a repeated collision with the secondary:
/// `2 pi I + 2 theta` for direct and rectilinear arcs,
/// `2 pi (I + 1) - 2 theta` for retrograde ones.
pub fn timing_target(theta: f64, revs_m2: u32, rotation: Rotation) -> f64 {
    match rotation {
        Rotation::Direct => 2.0 * PI * revs_m2 as f64 + 2.0 * theta,
        Rotation::Retrograde => 2.0 * PI * (revs_m2 as f64 + 1.0) - 2.0 * theta,
    }
}

/// Semi-major axis `a > 1` whose windingless outgoing arc at angle
/// `theta` satisfies the timing condition for `revs_m2` revolutions.
///
/// The elapsed time is strictly increasing and unbounded in `a`, so the
/// bracket `[1+, a_hi]` with doubling of `a_hi` is safe; bisection to
/// 1e-12 is followed by a short Newton polish.
pub fn solve_timing(theta: f64, revs_m2: u32, rotation: Rotation) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::Domain(format!("theta {theta} outside [0, pi]")));
    }
    if revs_m2 == 0 {
        return Err(Error::Domain("timing condition requires I >= 1".into()));
    }
    let target = timing_target(theta, revs_m2, rotation);
    let tau = |a: f64| lambert::arc_elapsed_time(a, theta, 0, ArcDirection::Outgoing);

    let lo = 1.0 + 1e-9;
    if tau(lo)? >= target {
        return Err(Error::Infeasible(format!(
            "timing target {target} already exceeded at a -> 1+ for theta = {theta}"
        )));
    }
    let mut hi = 2.0;
    while tau(hi)? < target {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Infeasible(format!(
                "timing target {target} unreachable below a = 1e6"
            )));
        }
    }
    let f = |a: f64| tau(a).map(|t| t - target).unwrap_or(f64::NAN);
    let root = rootfind::bisect(f, lo, hi, 1e-12)?;
    let root = rootfind::newton_polish(f, root, 3, 1e-7);
    let residual = tau(root)? - target;
    if residual.abs() > 1e-10 {
        return Err(Error::NoConvergence(format!(
            "timing residual {residual:.3e} at a = {root}"
        )));
    }
    Ok(root)
}

/// Action of the arc with `winding` revolutions of the small body,
/// combining the elapsed time, the angular momentum and the regularized
/// duration:
/// `(J T + tau0)(-1/a - eps' sqrt(a(1-eps^2))) + 8 sqrt(a) (pi J / 2 + arccos(...))`.
pub fn arc_action(a: f64, theta: f64, rotation: Rotation, winding: u32) -> Result<f64> {
    let eps = kepler::eccentricity_from_theta(a, theta)?;
    let tau = lambert::arc_elapsed_time(a, theta, winding, ArcDirection::Outgoing)?;
    let two_h_plus_l = -1.0 / a - rotation.sign() * (a * (1.0 - eps * eps)).max(0.0).sqrt();
    let sigma = arc_sigma(a, eps, winding)?;
    Ok(tau * two_h_plus_l + 8.0 * sigma)
}

/// Regularized duration `sigma = J pi sqrt(a) / 2 + sigma0`.
pub fn arc_sigma(a: f64, eps: f64, winding: u32) -> Result<f64> {
    Ok(winding as f64 * PI * a.sqrt() / 2.0 + kepler::lc_sigma0(a, eps)?)
}

/// Period of a circular orbit of radius `a` in the rotating frame,
/// `2 pi / |a^{-3/2} - eps'|`.
pub fn circular_period(a: f64, rotation: Rotation) -> Result<f64> {
    circular_denominator(a, rotation).map(|d| 2.0 * PI / d)
}

/// Action of a circular orbit in the rotating frame,
/// `2 pi / |a^{-3/2} - eps'| * (1/a - eps' sqrt(a))`.
pub fn circular_action(a: f64, rotation: Rotation) -> Result<f64> {
    let period = circular_period(a, rotation)?;
    Ok(period * (1.0 / a - rotation.sign() * a.sqrt()))
}

fn circular_denominator(a: f64, rotation: Rotation) -> Result<f64> {
    if a <= 0.0 || !a.is_finite() {
        return Err(Error::Domain(format!("radius {a} must be positive")));
    }
    let d = (a.powf(-1.5) - rotation.sign()).abs();
    if d == 0.0 {
        return Err(Error::Singular(
            "direct circular orbit of radius 1 is stationary in rotating coordinates".into(),
        ));
    }
    Ok(d)
}

/// Action of a resonant full-ellipse generating orbit with coprime
/// revolution numbers `I` of the secondary and `J >= 1` of the small
/// body: `2 pi (cbrt(I J^2) - eps' cbrt(I^4 / J) sqrt(1 - eps^2))`.
pub fn second_kind_action(
    revs_m2: u32,
    revs_m3: u32,
    eps: f64,
    rotation: Rotation,
) -> Result<f64> {
    if revs_m2 == 0 || revs_m3 == 0 {
        return Err(Error::Domain("second-kind orbits need I, J >= 1".into()));
    }
    if gcd(revs_m2, revs_m3) != 1 {
        return Err(Error::Domain(format!(
            "revolution numbers ({revs_m2}, {revs_m3}) must be coprime: repeated identical full-ellipse arcs are excluded"
        )));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Domain(format!("eccentricity {eps} outside [0, 1)")));
    }
    let (i, j) = (revs_m2 as f64, revs_m3 as f64);
    Ok(2.0 * PI * ((i * j * j).cbrt() - rotation.sign() * (i.powi(4) / j).cbrt() * (1.0 - eps * eps).sqrt()))
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// True for arcs excluded from the nondegenerate sequences: rectilinear
/// (`theta = 0`), tangent (`theta = pi`), and the parallel-velocity
/// collision at `theta = pi/2`.
pub fn exclude_degenerate(arc: &GeneratingArc) -> bool {
    let theta = arc.ellipse.theta;
    theta.abs() <= 1e-9 || (theta - PI).abs() <= 1e-9 || (theta - PI / 2.0).abs() <= 1e-9
}

/// One-parameter family description for `build_sequence`.
#[derive(Debug, Clone, PartialEq)]
pub enum SequenceMode {
    /// Fix the polar collision angle; solve the timing condition per `I`.
    FixedTheta { theta: f64 },
    /// Fix the semi-minor axis; `theta` follows from the geometry.
    FixedB { b: f64 },
    /// Fix the rotating energy `c0 in [-sqrt(2), 0)`; per `I`, find the
    /// angle where the timing-solved arc attains that energy. The search
    /// window may be overridden; by default it starts at half the
    /// limit-curve angle `arccos(1 - c0^2)` and shrinks adaptively.
    FixedEnergy { c0: f64, theta_window: Option<(f64, f64)> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SequenceSpec {
    pub mode: SequenceMode,
    pub revs_m2: RangeInclusive<u32>,
    pub rotation: Rotation,
}

/// Result of building a sequence: resolved arcs in increasing `I`, plus
/// the indices that were skipped as infeasible, with their diagnostics.
#[derive(Debug)]
pub struct SequenceOutcome {
    pub arcs: Vec<GeneratingArc>,
    pub skipped: Vec<(u32, Error)>,
}

/// Build one arc per `I` in the range. Infeasible indices (timing target
/// unreachable, or no energy crossing in the window) are skipped and
/// reported in `skipped`; output ordering is by `I` regardless.
pub fn build_sequence(spec: &SequenceSpec) -> SequenceOutcome {
    let mut out = SequenceOutcome { arcs: Vec::new(), skipped: Vec::new() };
    for i in spec.revs_m2.clone() {
        let arc = match &spec.mode {
            SequenceMode::FixedTheta { theta } => arc_for_theta(*theta, i, spec.rotation),
            SequenceMode::FixedB { b } => arc_for_semi_minor(*b, i, spec.rotation),
            SequenceMode::FixedEnergy { c0, theta_window } => {
                arc_for_energy(*c0, i, spec.rotation, *theta_window)
            }
        };
        match arc {
            Ok(arc) => out.arcs.push(arc),
            Err(e) => out.skipped.push((i, e)),
        }
    }
    out
}

/// Resolve the fixed-angle arc for one revolution count.
pub fn arc_for_theta(theta: f64, revs_m2: u32, rotation: Rotation) -> Result<GeneratingArc> {
    let a = solve_timing(theta, revs_m2, rotation)?;
    finish_arc(a, theta, revs_m2, rotation)
}

/// Resolve the fixed-semi-minor-axis arc for one revolution count: both
/// the elapsed time and the timing target move with `a` here, since
/// `theta` is a function of the geometry.
pub fn arc_for_semi_minor(b: f64, revs_m2: u32, rotation: Rotation) -> Result<GeneratingArc> {
    if b <= 0.0 {
        return Err(Error::Domain(format!("semi-minor axis {b} must be positive")));
    }
    if revs_m2 == 0 {
        return Err(Error::Domain("timing condition requires I >= 1".into()));
    }
    let theta_of = |a: f64| -> Result<f64> {
        let eps = kepler::eccentricity_from_b(a, b)?;
        if eps == 0.0 {
            return Err(Error::Domain("circular geometry has no collision angle".into()));
        }
        let cos_theta = (1.0 - b * b / a) / eps;
        kepler::guarded_unit_interval(cos_theta.abs(), "fixed-b cos(theta)")?;
        Ok(cos_theta.clamp(-1.0, 1.0).acos())
    };
    let g = |a: f64| -> Result<f64> {
        let theta = theta_of(a)?;
        let tau = lambert::arc_elapsed_time(a, theta, 0, ArcDirection::Outgoing)?;
        Ok(tau - timing_target(theta, revs_m2, rotation))
    };
    let lo = b.max(1.0) + 1e-9;
    if g(lo)? >= 0.0 {
        return Err(Error::Infeasible(format!(
            "fixed-b timing target already exceeded at a -> {lo}"
        )));
    }
    let mut hi = (2.0 * lo).max(2.0);
    while g(hi)? < 0.0 {
        hi *= 2.0;
        if hi > 1e6 {
            return Err(Error::Infeasible("fixed-b timing target unreachable".into()));
        }
    }
    let f = |a: f64| g(a).unwrap_or(f64::NAN);
    let root = rootfind::bisect(f, lo, hi, 1e-12)?;
    let a = rootfind::newton_polish(f, root, 3, 1e-7);
    finish_arc(a, theta_of(a)?, revs_m2, rotation)
}

/// Resolve the arc of prescribed rotating energy `c0` for one revolution
/// count, by root-finding the angle on the energy curve of the
/// timing-solved family.
///
/// The curves lie strictly below the limit `-sqrt(1 - cos theta)`, so
/// the crossing with `c0` sits strictly left of `arccos(1 - c0^2)`; the
/// bracket starts at half that angle and halves further when needed.
pub fn arc_for_energy(
    c0: f64,
    revs_m2: u32,
    rotation: Rotation,
    theta_window: Option<(f64, f64)>,
) -> Result<GeneratingArc> {
    if !(-std::f64::consts::SQRT_2..0.0).contains(&c0) {
        return Err(Error::Domain(format!("target energy {c0} outside [-sqrt(2), 0)")));
    }
    if rotation != Rotation::Direct {
        return Err(Error::Domain(
            "energy-targeted sequences are defined for direct arcs".into(),
        ));
    }
    let energy_at = |theta: f64| -> Result<f64> {
        let a = solve_timing(theta, revs_m2, rotation)?;
        kepler::rotating_energy(a, theta, rotation)
    };
    let limit_angle = (1.0 - c0 * c0).acos();
    let (mut lo, hi) = theta_window.unwrap_or((limit_angle / 2.0, limit_angle));
    let hi = hi.min(PI - 1e-9);
    let f_hi = energy_at(hi)? - c0;
    if f_hi >= 0.0 {
        return Err(Error::Infeasible(format!(
            "energy curve not below c0 = {c0} at theta = {hi}"
        )));
    }
    let mut f_lo = energy_at(lo)? - c0;
    while f_lo <= 0.0 {
        lo /= 2.0;
        if lo < 1e-6 {
            return Err(Error::Infeasible(format!(
                "no crossing of c0 = {c0} for I = {revs_m2}: curve stays below the target"
            )));
        }
        f_lo = energy_at(lo)? - c0;
    }
    let f = |theta: f64| energy_at(theta).map(|h| h - c0).unwrap_or(f64::NAN);
    let theta = rootfind::bisect(f, lo, hi, 1e-13)?;
    let theta = rootfind::newton_polish(f, theta, 2, 1e-8);
    let arc = finish_arc(solve_timing(theta, revs_m2, rotation)?, theta, revs_m2, rotation)?;
    if (arc.h0 - c0).abs() > 1e-8 {
        return Err(Error::NoConvergence(format!(
            "energy residual {:.3e} at theta = {theta}",
            arc.h0 - c0
        )));
    }
    Ok(arc)
}

fn finish_arc(a: f64, theta: f64, revs_m2: u32, rotation: Rotation) -> Result<GeneratingArc> {
    let eps = kepler::eccentricity_from_theta(a, theta)?;
    let tau = lambert::arc_elapsed_time(a, theta, 0, ArcDirection::Outgoing)?;
    let sigma = arc_sigma(a, eps, 0)?;
    let h0 = kepler::rotating_energy(a, theta, rotation)?;
    let action = arc_action(a, theta, rotation, 0)?;
    Ok(GeneratingArc {
        ellipse: EllipseParams { a, eps, rotation, theta },
        revs_m2,
        revs_m3: 0,
        tau,
        sigma,
        h0,
        action,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn solve_timing_table_values() {
        assert_abs_diff_eq!(solve_timing(0.0, 1, Rotation::Direct).unwrap(), 1.114891, epsilon = 1e-6);
        assert_abs_diff_eq!(
            solve_timing(PI / 2.0, 1, Rotation::Direct).unwrap(),
            1.471746,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(
            solve_timing(PI / 18.0, 10, Rotation::Direct).unwrap(),
            4.707173,
            epsilon = 1e-6
        );
    }

    #[test]
    fn solve_timing_residuals_tiny() {
        for &theta in &[0.0, 0.4, PI / 2.0, 2.8, PI] {
            for i in [1, 2, 7] {
                let a = solve_timing(theta, i, Rotation::Direct).unwrap();
                let tau = lambert::arc_elapsed_time(a, theta, 0, ArcDirection::Outgoing).unwrap();
                assert!((tau - timing_target(theta, i, Rotation::Direct)).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn arc_action_table_values() {
        let a90 = solve_timing(PI / 2.0, 1, Rotation::Direct).unwrap();
        assert_abs_diff_eq!(
            arc_action(a90, PI / 2.0, Rotation::Direct, 0).unwrap(),
            -5.285607,
            epsilon = 5e-6
        );
        let a0 = solve_timing(0.0, 1, Rotation::Direct).unwrap();
        assert_abs_diff_eq!(
            arc_action(a0, 0.0, Rotation::Direct, 0).unwrap(),
            1.434641,
            epsilon = 5e-6
        );
        let a10 = solve_timing(PI / 18.0, 10, Rotation::Direct).unwrap();
        assert_abs_diff_eq!(
            arc_action(a10, PI / 18.0, Rotation::Direct, 0).unwrap(),
            -0.130527,
            epsilon = 5e-6
        );
    }

    #[test]
    fn rectilinear_action_closed_form() {
        // theta = 0: A = 4 sqrt(a) arccos(sqrt(1/(2a))) - 2 sqrt(2 - 1/a),
        // nonnegative on the whole family.
        for &a in &[1.05f64, 1.114891, 2.0, 7.3] {
            let closed = 4.0 * a.sqrt() * (1.0 / (2.0 * a)).sqrt().acos()
                - 2.0 * (2.0 - 1.0 / a).sqrt();
            let general = arc_action(a, 0.0, Rotation::Direct, 0).unwrap();
            assert_abs_diff_eq!(general, closed, epsilon = 1e-12);
            assert!(closed >= 0.0);
        }
    }

    #[test]
    fn tangent_action_closed_form() {
        // theta = pi: A = 2 pi sqrt(a) - 2 pi eps' a sqrt(2a - 1), sign -eps'.
        for rot in [Rotation::Direct, Rotation::Retrograde] {
            for &a in &[1.2f64, 1.587401, 3.0] {
                let closed =
                    2.0 * PI * a.sqrt() - 2.0 * PI * rot.sign() * a * (2.0 * a - 1.0).sqrt();
                let general = arc_action(a, PI, rot, 0).unwrap();
                assert_abs_diff_eq!(general, closed, epsilon = 1e-10);
                assert_eq!(closed.signum(), -rot.sign());
            }
        }
    }

    #[test]
    fn circular_orbit_values() {
        assert_abs_diff_eq!(circular_period(1.0, Rotation::Retrograde).unwrap(), PI);
        assert_abs_diff_eq!(circular_action(1.0, Rotation::Retrograde).unwrap(), 2.0 * PI);
        assert_abs_diff_eq!(
            circular_period(4.0, Rotation::Direct).unwrap(),
            16.0 * PI / 7.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            circular_period(4.0, Rotation::Retrograde).unwrap(),
            16.0 * PI / 9.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            circular_action(4.0, Rotation::Direct).unwrap(),
            -4.0 * PI,
            epsilon = 1e-12
        );
        assert!(circular_action(1.0, Rotation::Direct).is_err());
        // The direct-orbit action converges to -2 pi at the singularity
        // from outside, +2 pi from inside.
        let outside = circular_action(1.0 + 1e-7, Rotation::Direct).unwrap();
        assert_abs_diff_eq!(outside, -2.0 * PI, epsilon = 1e-5);
        let inside = circular_action(1.0 - 1e-7, Rotation::Direct).unwrap();
        assert_abs_diff_eq!(inside, 2.0 * PI, epsilon = 1e-5);
    }

    #[test]
    fn second_kind_values() {
        assert_abs_diff_eq!(
            second_kind_action(1, 1, 0.0, Rotation::Retrograde).unwrap(),
            4.0 * PI,
            epsilon = 1e-12
        );
        // Frozen from the eccentric-anomaly quadrature oracle below.
        let a = second_kind_action(2, 1, 0.5, Rotation::Direct).unwrap();
        assert_abs_diff_eq!(a, -5.7951466, epsilon = 1e-6);
        assert!(second_kind_action(4, 2, 0.1, Rotation::Direct).is_err());
        assert!(second_kind_action(0, 1, 0.1, Rotation::Direct).is_err());
        // a = (I/J)^{2/3} <= 1 forbids negative action for direct motion;
        // the circular 1:1 case degenerates to exactly zero.
        for (i, j) in [(1u32, 1u32), (1, 2), (2, 3), (3, 5)] {
            for &eps in &[0.0, 0.3, 0.9] {
                let action = second_kind_action(i, j, eps, Rotation::Direct).unwrap();
                assert!(action >= 0.0);
                if eps > 0.0 || (i, j) != (1, 1) {
                    assert!(action > 0.0);
                }
            }
        }
    }

    /// Quadrature oracle for the second-kind action: integrate
    /// `|P|^2 + L` over J full ellipses using the eccentric anomaly
    /// parametrization and Simpson's rule.
    #[test]
    fn second_kind_action_matches_quadrature() {
        let (i, j, eps) = (2u32, 1u32, 0.5f64);
        let a = (i as f64 / j as f64).powf(2.0 / 3.0);
        let l = -(a * (1.0 - eps * eps)).sqrt();
        let n = 20_000usize;
        let mut sum = 0.0;
        for k in 0..=n {
            let e_anom = 2.0 * PI * k as f64 / n as f64;
            let r = a * (1.0 - eps * e_anom.cos());
            let integrand = (2.0 / r - 1.0 / a + l) * (a.powf(1.5) * (1.0 - eps * e_anom.cos()));
            let w = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            sum += w * integrand;
        }
        let quad = j as f64 * sum * (2.0 * PI / n as f64) / 3.0;
        assert_abs_diff_eq!(
            quad,
            second_kind_action(i, j, eps, Rotation::Direct).unwrap(),
            epsilon = 1e-6
        );
    }

    #[test]
    fn fixed_theta_sequence_monotonicity() {
        let spec = SequenceSpec {
            mode: SequenceMode::FixedTheta { theta: PI / 18.0 },
            revs_m2: 1..=20,
            rotation: Rotation::Direct,
        };
        let out = build_sequence(&spec);
        assert!(out.skipped.is_empty());
        assert_eq!(out.arcs.len(), 20);
        for w in out.arcs.windows(2) {
            assert!(w[1].ellipse.a > w[0].ellipse.a);
            assert!(w[1].h0 > w[0].h0);
        }
        for arc in &out.arcs {
            assert!(arc.timing_residual().abs() <= 1e-10);
            assert!(arc.action_identity_residual().abs() <= 1e-12);
        }
    }

    #[test]
    fn fixed_b_sequence_behavior() {
        let spec = SequenceSpec {
            mode: SequenceMode::FixedB { b: 1.0 },
            revs_m2: 1..=40,
            rotation: Rotation::Direct,
        };
        let out = build_sequence(&spec);
        assert!(out.skipped.is_empty());
        let h: Vec<f64> = out.arcs.iter().map(|a| a.h0).collect();
        for w in h.windows(2) {
            assert!(w[1] > w[0]);
        }
        assert!(h.iter().all(|&v| v < 0.0));
        let actions: Vec<f64> = out.arcs.iter().map(|a| a.action).collect();
        assert!(actions[39] < actions[0]);
        assert!(actions[39] < 0.0);
        // Strict decrease holds on the tail of the family.
        for w in actions[5..].windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn fixed_energy_sequence_hits_target() {
        for &c0 in &[-1.2, -0.7] {
            let spec = SequenceSpec {
                mode: SequenceMode::FixedEnergy { c0, theta_window: None },
                revs_m2: 1..=12,
                rotation: Rotation::Direct,
            };
            let out = build_sequence(&spec);
            assert!(!out.arcs.is_empty());
            for arc in &out.arcs {
                assert!((arc.h0 - c0).abs() <= 1e-8, "H0 residual for c0 = {c0}");
                // The crossing sits strictly left of the limit-curve angle.
                assert!(arc.ellipse.theta < (1.0 - c0 * c0).acos());
            }
        }
    }

    #[test]
    fn fixed_energy_skips_infeasible_heads() {
        // c0 = -0.1 requires a large semi-major axis; small I infeasible.
        let spec = SequenceSpec {
            mode: SequenceMode::FixedEnergy { c0: -0.1, theta_window: None },
            revs_m2: 1..=14,
            rotation: Rotation::Direct,
        };
        let out = build_sequence(&spec);
        assert!(!out.skipped.is_empty());
        assert!(!out.arcs.is_empty());
        let first = out.arcs.first().unwrap().revs_m2;
        assert!(first >= 10, "first feasible index {first}");
        for (i, _) in &out.skipped {
            assert!(*i < first);
        }
    }

    #[test]
    fn degenerate_flags() {
        let arc = arc_for_theta(PI / 2.0, 1, Rotation::Direct).unwrap();
        assert!(exclude_degenerate(&arc));
        let arc = arc_for_theta(PI / 3.0, 1, Rotation::Direct).unwrap();
        assert!(!exclude_degenerate(&arc));
        let arc = arc_for_theta(PI, 1, Rotation::Direct).unwrap();
        assert!(exclude_degenerate(&arc));
        let arc = arc_for_theta(0.0, 1, Rotation::Direct).unwrap();
        assert!(exclude_degenerate(&arc));
    }

    #[test]
    fn retrograde_timing_branch() {
        let a = solve_timing(2.0, 1, Rotation::Retrograde).unwrap();
        let tau = lambert::arc_elapsed_time(a, 2.0, 0, ArcDirection::Outgoing).unwrap();
        assert_abs_diff_eq!(tau, 4.0 * PI - 4.0, epsilon = 1e-10);
    }

    #[test]
    fn monotone_energy_curves_in_revolutions() {
        // c_I(theta) increases with I at fixed theta.
        for &theta in &[0.5, 1.5, 2.5] {
            let mut prev = f64::NEG_INFINITY;
            for i in 1..=6 {
                let a = solve_timing(theta, i, Rotation::Direct).unwrap();
                let h = kepler::rotating_energy(a, theta, Rotation::Direct).unwrap();
                assert!(h > prev);
                prev = h;
            }
        }
    }
}
