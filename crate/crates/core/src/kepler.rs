//! Closed-form two-body geometry in the rotating frame.
//!
//! Everything here is expressed through the semi-major axis `a`, the
//! eccentricity `eps` and the direction of rotation of the supporting
//! ellipse, in units where the primary separation, the gravitational
//! parameter and the frame's angular velocity are all 1. The
//! Levi-Civita quantities (`varpi`, `alpha`, `beta`, `sigma0`) describe
//! the same ellipse as a harmonic-oscillator orbit in regularized time.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Direction of rotation of a Kepler orbit in fixed coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rotation {
    /// Anti-clockwise (prograde) motion, `eps' = +1`.
    Direct,
    /// Clockwise motion, `eps' = -1`.
    Retrograde,
}

impl Rotation {
    pub fn sign(self) -> f64 {
        match self {
            Rotation::Direct => 1.0,
            Rotation::Retrograde => -1.0,
        }
    }
}

impl std::fmt::Display for Rotation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Rotation::Direct => write!(f, "direct"),
            Rotation::Retrograde => write!(f, "retrograde"),
        }
    }
}

/// Geometric data of a supporting Kepler ellipse that intersects the
/// unit circle, oriented with its apocenter on the positive axis.
///
/// `theta` is the polar angle of the intersection with the unit circle,
/// measured from the apocenter direction; the focal-distance relation
/// `eps cos(theta) = 1 - a (1 - eps^2)` ties the three scalars together.
/// The rectilinear limit `theta = 0` carries `eps = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipseParams {
    /// Semi-major axis, in units of the primary separation.
    pub a: f64,
    /// Eccentricity. In `[0, 1)` for proper ellipses, exactly 1 for the
    /// rectilinear `theta = 0` degenerate case.
    pub eps: f64,
    /// Direction of rotation (`eps'`).
    pub rotation: Rotation,
    /// Polar collision angle in radians, in `[0, pi]`.
    pub theta: f64,
}

impl EllipseParams {
    /// Ellipse of given semi-major axis meeting the unit circle at polar
    /// angle `theta`.
    pub fn from_theta(a: f64, theta: f64, rotation: Rotation) -> Result<Self> {
        let eps = eccentricity_from_theta(a, theta)?;
        Ok(EllipseParams { a, eps, rotation, theta })
    }

    /// Ellipse of given semi-major and semi-minor axes; `theta` is
    /// recovered from the focal-distance relation.
    pub fn from_semi_minor(a: f64, b: f64, rotation: Rotation) -> Result<Self> {
        let eps = eccentricity_from_b(a, b)?;
        if eps == 0.0 {
            return Err(Error::Domain(format!(
                "circular orbit a = b = {a} does not intersect the unit circle transversally"
            )));
        }
        let cos_theta = (1.0 - a * (1.0 - eps * eps)) / eps;
        if !(-1.0 - 1e-12..=1.0 + 1e-12).contains(&cos_theta) {
            return Err(Error::Domain(format!(
                "ellipse a = {a}, b = {b} does not reach the unit circle"
            )));
        }
        let theta = cos_theta.clamp(-1.0, 1.0).acos();
        Ok(EllipseParams { a, eps, rotation, theta })
    }

    /// Pericenter distance `a (1 - eps)`.
    pub fn pericenter(&self) -> f64 {
        self.a * (1.0 - self.eps)
    }

    /// Apocenter distance `a (1 + eps)`; the `q0` column of the orbit tables.
    pub fn apocenter(&self) -> f64 {
        self.a * (1.0 + self.eps)
    }

    /// Residual of the focal-distance identity `eps cos(theta) - (1 - a(1 - eps^2))`.
    pub fn focal_identity_residual(&self) -> f64 {
        self.eps * self.theta.cos() - (1.0 - self.a * (1.0 - self.eps * self.eps))
    }
}

/// Coefficients of the Levi-Civita oscillator ellipse equivalent to a
/// Kepler ellipse with negative energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegularizedData {
    /// Angular frequency `sqrt(-8 H_fix)` in regularized time.
    pub varpi: f64,
    /// Oscillator semi-axis `sqrt(a (1 + eps))`.
    pub alpha: f64,
    /// Oscillator semi-axis `eps' sqrt(a (1 - eps))`, signed by rotation.
    pub beta: f64,
}

impl RegularizedData {
    pub fn new(a: f64, eps: f64, rotation: Rotation) -> Result<Self> {
        let h = kepler_energy(a)?;
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::Domain(format!("eccentricity {eps} outside [0, 1]")));
        }
        Ok(RegularizedData {
            varpi: (-8.0 * h).sqrt(),
            alpha: (a * (1.0 + eps)).sqrt(),
            beta: rotation.sign() * (a * (1.0 - eps)).sqrt(),
        })
    }

    /// Regularized-time duration of one full Kepler revolution, `pi / varpi`.
    pub fn full_revolution_sigma(&self) -> f64 {
        PI / self.varpi
    }
}

/// Kepler energy `H_fix = -1/(2a)` of a bounded orbit.
pub fn kepler_energy(a: f64) -> Result<f64> {
    if a <= 0.0 || !a.is_finite() {
        return Err(Error::Domain(format!("semi-major axis {a} must be positive")));
    }
    Ok(-1.0 / (2.0 * a))
}

/// Angular momentum `L = -eps' sqrt(a (1 - eps^2))` in the convention
/// `L = p1 q2 - p2 q1`: direct orbits have negative `L`.
pub fn angular_momentum(a: f64, eps: f64, rotation: Rotation) -> Result<f64> {
    if a <= 0.0 || !a.is_finite() {
        return Err(Error::Domain(format!("semi-major axis {a} must be positive")));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Domain(format!(
            "eccentricity {eps} outside [0, 1): no bounded ellipse"
        )));
    }
    Ok(-rotation.sign() * (a * (1.0 - eps * eps)).sqrt())
}

/// Kepler period `T = 2 pi sqrt(a^3)`.
pub fn kepler_period(a: f64) -> Result<f64> {
    if a <= 0.0 || !a.is_finite() {
        return Err(Error::Domain(format!("semi-major axis {a} must be positive")));
    }
    Ok(2.0 * PI * a.powf(1.5))
}

/// Eccentricity of the ellipse with semi-major axis `a > 1` whose polar
/// collision angle with the unit circle is `theta`:
/// `eps = (cos theta + sqrt(cos^2 theta + 4a(a-1))) / (2a)`.
///
/// At `theta = 0` the formula degenerates to `eps = 1`, the rectilinear
/// orbit; callers treat that case separately where it matters.
pub fn eccentricity_from_theta(a: f64, theta: f64) -> Result<f64> {
    if a <= 1.0 || !a.is_finite() {
        return Err(Error::Domain(format!(
            "semi-major axis {a} must exceed 1 for the fixed-theta parameterization"
        )));
    }
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::Domain(format!("theta {theta} outside [0, pi]")));
    }
    let c = theta.cos();
    let eps = (c + (c * c + 4.0 * a * (a - 1.0)).sqrt()) / (2.0 * a);
    Ok(eps.min(1.0))
}

/// Eccentricity from the semi-minor axis, `eps = sqrt(1 - b^2/a^2)`.
pub fn eccentricity_from_b(a: f64, b: f64) -> Result<f64> {
    if b <= 0.0 || a <= 0.0 || !a.is_finite() || !b.is_finite() {
        return Err(Error::Domain(format!("axes a = {a}, b = {b} must be positive")));
    }
    if b > a {
        return Err(Error::Domain(format!("semi-minor axis {b} exceeds semi-major {a}")));
    }
    Ok((1.0 - (b / a) * (b / a)).max(0.0).sqrt())
}

/// Rotating-frame energy `H_0 = H_fix + L` of the fixed-theta arc:
/// `-1/(2a) - eps' sqrt(1 - cos(theta) (cos(theta) + sqrt(4a^2 - 4a + cos^2 theta)) / (2a))`.
///
/// Strictly increasing in `a` for direct rotation, with limit
/// `-eps' sqrt(1 - cos theta)` as `a -> inf`. At `theta = 0` the radical
/// vanishes and the value is the pure Kepler energy.
pub fn rotating_energy(a: f64, theta: f64, rotation: Rotation) -> Result<f64> {
    if a <= 1.0 || !a.is_finite() {
        return Err(Error::Domain(format!("semi-major axis {a} must exceed 1")));
    }
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::Domain(format!("theta {theta} outside [0, pi]")));
    }
    Ok(-1.0 / (2.0 * a) - rotation.sign() * angular_momentum_magnitude(a, theta))
}

/// `sqrt(1 - cos(theta)(cos(theta) + D)/(2a)) = sqrt(a(1 - eps^2))`,
/// the angular momentum magnitude of the fixed-theta arc.
///
/// For acute angles the direct radicand cancels catastrophically near
/// `theta = 0`; rationalizing gives `2a sin^2(theta) / (2a - c^2 + cD)`,
/// whose denominator is safe there, while the direct form stays safe on
/// the obtuse side.
fn angular_momentum_magnitude(a: f64, theta: f64) -> f64 {
    let c = theta.cos();
    let d = (4.0 * a * a - 4.0 * a + c * c).sqrt();
    if c >= 0.0 {
        let s = theta.sin();
        s * (2.0 * a / (2.0 * a - c * c + c * d)).sqrt()
    } else {
        (1.0 - c * (c + d) / (2.0 * a)).max(0.0).sqrt()
    }
}

/// Closed-form derivative of `rotating_energy` with respect to `a`,
/// valid for ordinary arcs `theta in (0, pi)`.
///
/// Writing it as `(2R + eps' cos(theta) N) / (4 a^2 R)` with
/// `N = (4a^2 - 2a)/D - cos(theta) - D > 0`, one checks `2R` dominates
/// the second term for either rotation sense, so the derivative is
/// strictly positive throughout the domain: the energy of the
/// timing-solved family increases along `a` for direct and retrograde
/// arcs alike.
pub fn dh0_da(a: f64, theta: f64, rotation: Rotation) -> Result<f64> {
    if a <= 1.0 || !a.is_finite() {
        return Err(Error::Domain(format!("semi-major axis {a} must exceed 1")));
    }
    if theta <= 0.0 || theta >= PI {
        return Err(Error::Domain(format!(
            "theta {theta} outside (0, pi): rectilinear and tangent arcs are excluded"
        )));
    }
    let c = theta.cos();
    let d = (4.0 * a * a - 4.0 * a + c * c).sqrt();
    let r = angular_momentum_magnitude(a, theta);
    // The bracket (4a^2 - 2a)/D - c - D in the quotient-rule numerator
    // cancels catastrophically near theta = 0; algebraically it equals
    // 2 a R^2 / D, which collapses the whole second term to cR/(2aD).
    Ok(1.0 / (2.0 * a * a) + rotation.sign() * c * r / (2.0 * a * d))
}

/// Half-arc duration in Levi-Civita regularized time between the two
/// unit-circle crossings of an outgoing arc (no winding):
/// `sigma0 = sqrt(a) arccos(sqrt((1 - a(1 - eps)) / (2 a eps)))`.
pub fn lc_sigma0(a: f64, eps: f64) -> Result<f64> {
    if a <= 0.0 || !a.is_finite() {
        return Err(Error::Domain(format!("semi-major axis {a} must be positive")));
    }
    if eps <= 0.0 || eps > 1.0 {
        return Err(Error::Domain(format!(
            "eccentricity {eps} outside (0, 1]: no transversal unit-circle crossing"
        )));
    }
    let arg = (1.0 - a * (1.0 - eps)) / (2.0 * a * eps);
    let arg = guarded_unit_interval(arg, "lc_sigma0 arccos argument")?;
    Ok(a.sqrt() * arg.sqrt().acos())
}

/// Point of the Levi-Civita oscillator ellipse at regularized time `s`.
///
/// The complex square of the returned point lies on the supporting
/// Kepler ellipse, apocenter on the positive axis at `s = 0`.
pub fn lc_parametrize(a: f64, eps: f64, rotation: Rotation, s: f64) -> Result<[f64; 2]> {
    let reg = RegularizedData::new(a, eps, rotation)?;
    Ok([reg.alpha * (reg.varpi * s).cos(), reg.beta * (reg.varpi * s).sin()])
}

/// Complex square `(x1 + i x2)^2` mapping oscillator points to Kepler points.
pub fn complex_square(x: [f64; 2]) -> [f64; 2] {
    [x[0] * x[0] - x[1] * x[1], 2.0 * x[0] * x[1]]
}

/// Eccentric anomaly solving Kepler's equation `M = E - eps sin E` by
/// safeguarded Newton iteration with a bisection fallback, to 1e-13 in `E`.
pub fn solve_eccentric_anomaly(mean_anomaly: f64, eps: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::Domain(format!("eccentricity {eps} outside [0, 1)")));
    }
    // Reduce to [0, 2pi) and solve there; E - M is 2pi-periodic.
    let two_pi = 2.0 * PI;
    let turns = (mean_anomaly / two_pi).floor();
    let m = mean_anomaly - turns * two_pi;
    let (mut lo, mut hi) = (m - eps, m + eps);
    let mut e = if eps > 0.8 { PI.min(hi) } else { m.max(1e-12) };
    for _ in 0..60 {
        let f = e - eps * e.sin() - m;
        if f.abs() < 1e-14 {
            break;
        }
        if f > 0.0 {
            hi = e;
        } else {
            lo = e;
        }
        let step = f / (1.0 - eps * e.cos());
        let next = e - step;
        // Fall back to bisection whenever Newton leaves the bracket.
        e = if next <= lo || next >= hi { 0.5 * (lo + hi) } else { next };
        if (hi - lo).abs() < 1e-13 {
            break;
        }
    }
    let residual = e - eps * e.sin() - m;
    if residual.abs() > 1e-12 {
        return Err(Error::NoConvergence(format!(
            "Kepler equation residual {residual:.3e} at M = {mean_anomaly}, eps = {eps}"
        )));
    }
    Ok(e + turns * two_pi)
}

/// Clamp values within 1e-12 of `[0, 1]` onto the interval; reject
/// larger excursions as genuine domain violations.
pub(crate) fn guarded_unit_interval(x: f64, what: &str) -> Result<f64> {
    if (-1e-12..=1.0 + 1e-12).contains(&x) {
        Ok(x.clamp(0.0, 1.0))
    } else {
        Err(Error::Domain(format!("{what} = {x} outside [0, 1]")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn kepler_energy_values() {
        assert_abs_diff_eq!(kepler_energy(1.0).unwrap(), -0.5);
        assert_abs_diff_eq!(kepler_energy(2.0).unwrap(), -0.25);
        // Rectilinear table row: H0 equals H_fix because L = 0.
        assert_abs_diff_eq!(kepler_energy(1.114891).unwrap(), -0.448474, epsilon = 1e-6);
        assert!(kepler_energy(0.0).is_err());
        assert!(kepler_energy(-1.0).is_err());
    }

    #[test]
    fn angular_momentum_sign_and_magnitude() {
        assert_abs_diff_eq!(angular_momentum(1.0, 0.0, Rotation::Retrograde).unwrap(), 1.0);
        assert_abs_diff_eq!(angular_momentum(1.0, 0.0, Rotation::Direct).unwrap(), -1.0);
        assert_abs_diff_eq!(
            angular_momentum(4.0, 0.5, Rotation::Direct).unwrap(),
            -3.0f64.sqrt(),
            epsilon = 1e-14
        );
        assert!(angular_momentum(1.0, 1.0, Rotation::Direct).is_err());
    }

    /// Cross-check L against q x p along a direct Kepler solution sampled
    /// by eccentric anomaly: P1 Q2 - P2 Q1 = -sqrt(a (1 - eps^2)).
    #[test]
    fn angular_momentum_matches_parametrized_orbit() {
        let (a, eps): (f64, f64) = (4.0, 0.5);
        let b = a * (1.0 - eps * eps).sqrt();
        let n = a.powf(-1.5);
        for k in 0..17 {
            let e_anom = 2.0 * PI * k as f64 / 17.0;
            let (se, ce) = e_anom.sin_cos();
            let q = [a * (ce - eps), b * se];
            let e_dot = n / (1.0 - eps * ce);
            let p = [-a * se * e_dot, b * ce * e_dot];
            let l = p[0] * q[1] - p[1] * q[0];
            assert_relative_eq!(
                l,
                angular_momentum(a, eps, Rotation::Direct).unwrap(),
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn kepler_period_values() {
        assert_abs_diff_eq!(kepler_period(1.0).unwrap(), 2.0 * PI);
        assert_abs_diff_eq!(kepler_period(4.0).unwrap(), 16.0 * PI, epsilon = 1e-12);
        // Kepler's third law closure for a resonant ratio I/J = 2/1.
        let a = (2.0f64).powf(2.0 / 3.0);
        assert_abs_diff_eq!(kepler_period(a).unwrap(), 4.0 * PI, epsilon = 1e-12);
    }

    #[test]
    fn eccentricity_from_theta_values() {
        // a = 2, theta = pi/2: eps = sqrt((a-1)/a).
        let eps = eccentricity_from_theta(2.0, PI / 2.0).unwrap();
        assert_abs_diff_eq!(eps, 0.5f64.sqrt(), epsilon = 1e-14);
        // Focal-distance identity r(theta) = 1 at the crossing.
        let r = 2.0 * (1.0 - eps * eps) / (1.0 - eps * (PI / 2.0).cos());
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-12);

        // Near a -> 1+ the eccentricity at theta = pi/2 tends to 0.
        assert!(eccentricity_from_theta(1.0 + 1e-9, PI / 2.0).unwrap() < 1e-4);

        // Table row theta = 90 deg: apocenter matches the q0 column.
        let e90 = eccentricity_from_theta(1.471746, PI / 2.0).unwrap();
        assert_abs_diff_eq!(e90, 0.5662, epsilon = 1e-4);
        assert_abs_diff_eq!(1.471746 * (1.0 + e90), 2.304988, epsilon = 2e-5);

        // Rectilinear limit: the formula degenerates to eps = 1 exactly,
        // which satisfies the focal identity 1 * cos(0) = 1 - a * 0.
        let e0 = eccentricity_from_theta(1.114891, 0.0).unwrap();
        assert_abs_diff_eq!(e0, 1.0);

        assert!(eccentricity_from_theta(1.0, 0.3).is_err());
        assert!(eccentricity_from_theta(0.8, 0.3).is_err());
    }

    #[test]
    fn eccentricity_from_theta_focal_identity_on_grid() {
        for i in 1..40 {
            let a = 1.0 + 0.25 * i as f64;
            for j in 1..40 {
                let theta = PI * j as f64 / 40.0;
                let eps = eccentricity_from_theta(a, theta).unwrap();
                let residual = eps * theta.cos() - (1.0 - a * (1.0 - eps * eps));
                assert_abs_diff_eq!(residual, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn eccentricity_from_b_values() {
        assert_abs_diff_eq!(eccentricity_from_b(1.0, 1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(
            eccentricity_from_b(2.0, 1.0).unwrap(),
            3.0f64.sqrt() / 2.0,
            epsilon = 1e-15
        );
        let eps = eccentricity_from_b(5.0, 1.0).unwrap();
        assert_abs_diff_eq!(eps, 24.0f64.sqrt() / 5.0, epsilon = 1e-15);
        // Apocenter a(1 + eps) = a + sqrt(a^2 - 1) stays above 1.
        assert!(5.0 * (1.0 + eps) > 1.0);
        assert!(eccentricity_from_b(1.0, 2.0).is_err());
        assert!(eccentricity_from_b(1.0, 0.0).is_err());
    }

    #[test]
    fn rotating_energy_values() {
        assert_abs_diff_eq!(
            rotating_energy(1.114891, 0.0, Rotation::Direct).unwrap(),
            -0.448474,
            epsilon = 1e-6
        );
        assert_abs_diff_eq!(
            rotating_energy(2.0, PI / 2.0, Rotation::Direct).unwrap(),
            -1.25,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            rotating_energy(4.707173, PI / 18.0, Rotation::Direct).unwrap(),
            -0.236486,
            epsilon = 1e-6
        );
    }

    #[test]
    fn rotating_energy_monotone_and_bounded() {
        for &theta in &[0.3f64, 1.0, 2.0, 3.0] {
            let limit = -(1.0 - theta.cos()).sqrt();
            let mut prev = f64::NEG_INFINITY;
            for i in 1..200 {
                let a = 1.0 + 0.15 * i as f64;
                let h = rotating_energy(a, theta, Rotation::Direct).unwrap();
                assert!(h > prev, "H0 not increasing at a = {a}, theta = {theta}");
                assert!(h < limit, "H0 above its limit at a = {a}, theta = {theta}");
                prev = h;
            }
        }
    }

    #[test]
    fn dh0_da_values_and_sign() {
        assert_abs_diff_eq!(dh0_da(2.0, PI / 2.0, Rotation::Direct).unwrap(), 0.125);
        assert!(dh0_da(1.5, PI / 3.0, Rotation::Direct).unwrap() > 0.0);
        // The derivative is positive for the retrograde branch too; the
        // 3-point finite difference with step 1e-6 confirms it.
        let retro = dh0_da(1.5, PI / 3.0, Rotation::Retrograde).unwrap();
        let h = 1e-6;
        let fd = (rotating_energy(1.5 + h, PI / 3.0, Rotation::Retrograde).unwrap()
            - rotating_energy(1.5 - h, PI / 3.0, Rotation::Retrograde).unwrap())
            / (2.0 * h);
        assert_relative_eq!(retro, fd, max_relative = 1e-8);
        assert!(retro > 0.0);
        assert!(dh0_da(1.5, 0.0, Rotation::Direct).is_err());
        assert!(dh0_da(1.5, PI, Rotation::Direct).is_err());
    }

    /// 5-point central finite difference of `rotating_energy`; the wider
    /// stencil keeps rounding below 1e-8 relative even where the
    /// derivative itself is small.
    fn dh0_fd(a: f64, theta: f64, rot: Rotation) -> f64 {
        let h = 1e-4;
        let f = |x: f64| rotating_energy(x, theta, rot).unwrap();
        (-f(a + 2.0 * h) + 8.0 * f(a + h) - 8.0 * f(a - h) + f(a - 2.0 * h)) / (12.0 * h)
    }

    #[test]
    fn dh0_da_matches_finite_differences() {
        for rot in [Rotation::Direct, Rotation::Retrograde] {
            for i in 1..30 {
                let a = 1.0 + 0.5 * i as f64;
                for j in 1..30 {
                    let theta = PI * j as f64 / 30.0;
                    let exact = dh0_da(a, theta, rot).unwrap();
                    let fd = dh0_fd(a, theta, rot);
                    assert_relative_eq!(exact, fd, max_relative = 1e-8);
                    assert!(exact > 0.0);
                }
            }
        }
    }

    #[test]
    fn lc_sigma0_values() {
        // Fixed-b limit a -> 1+: sigma0 -> arccos(sqrt(1/2)) = pi/4.
        let a = 1.0 + 1e-9;
        let eps = eccentricity_from_b(a, 1.0).unwrap();
        assert_abs_diff_eq!(lc_sigma0(a, eps).unwrap(), PI / 4.0, epsilon = 1e-4);
        // Full-ellipse case: pericenter exactly 1 gives sigma0 = pi sqrt(a) / 2.
        let a = 1.587401;
        assert_abs_diff_eq!(
            lc_sigma0(a, 1.0 - 1.0 / a).unwrap(),
            PI * a.sqrt() / 2.0,
            epsilon = 1e-12
        );
        assert!(lc_sigma0(2.0, 0.0).is_err());
        // Pericenter above the unit circle: arccos argument escapes [0, 1].
        assert!(lc_sigma0(4.0, 0.1).is_err());
    }

    #[test]
    fn lc_parametrize_axis_points() {
        let (a, eps) = (1.3, 0.4);
        let reg = RegularizedData::new(a, eps, Rotation::Direct).unwrap();
        let x0 = lc_parametrize(a, eps, Rotation::Direct, 0.0).unwrap();
        assert_abs_diff_eq!(x0[0], reg.alpha);
        assert_abs_diff_eq!(x0[1], 0.0);
        let sq = complex_square(x0);
        assert_abs_diff_eq!(sq[0], a * (1.0 + eps), epsilon = 1e-14);

        let quarter = PI / (2.0 * reg.varpi);
        let x1 = lc_parametrize(a, eps, Rotation::Direct, quarter).unwrap();
        assert_abs_diff_eq!(x1[0], 0.0, epsilon = 1e-15);
        let sq = complex_square(x1);
        assert_abs_diff_eq!(sq[0], -a * (1.0 - eps), epsilon = 1e-14);
        assert_abs_diff_eq!(sq[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn lc_parametrize_squares_onto_kepler_ellipse() {
        let (a, eps) = (1.7, 0.62);
        let reg = RegularizedData::new(a, eps, Rotation::Direct).unwrap();
        assert_abs_diff_eq!(
            reg.alpha * reg.alpha - reg.beta * reg.beta,
            2.0 * a * eps,
            epsilon = 1e-13
        );
        let period = 2.0 * PI / reg.varpi;
        for k in 0..1000 {
            let s = period * k as f64 / 1000.0;
            let q = complex_square(lc_parametrize(a, eps, Rotation::Direct, s).unwrap());
            let r = (q[0] * q[0] + q[1] * q[1]).sqrt();
            let phi = q[1].atan2(q[0]);
            let focal = a * (1.0 - eps * eps) / (1.0 - eps * phi.cos());
            assert_abs_diff_eq!(r, focal, epsilon = 1e-12);
        }
    }

    #[test]
    fn regularized_frequency_requires_negative_energy() {
        let reg = RegularizedData::new(2.0, 0.3, Rotation::Direct).unwrap();
        assert_abs_diff_eq!(reg.varpi, (4.0f64 / 2.0).sqrt(), epsilon = 1e-15);
        assert!(reg.varpi > 0.0);
    }

    #[test]
    fn eccentric_anomaly_solver_roundtrip() {
        for &eps in &[0.0, 0.1, 0.5, 0.9, 0.99] {
            for k in 0..50 {
                let m = -8.0 + 16.0 * k as f64 / 49.0;
                let e = solve_eccentric_anomaly(m, eps).unwrap();
                assert_abs_diff_eq!(e - eps * e.sin(), m, epsilon = 1e-12);
            }
        }
    }
}
