//! Elapsed times of Keplerian arcs between unit-circle crossings.
//!
//! The arc time is assembled from rectilinear free-fall times after a
//! Lambert cycle, with the case split decided by the arc classification
//! (convex hull against the origin and the second focus). An eccentric
//! anomaly route through Kepler's equation provides an independent
//! cross-check that bypasses the free-fall construction entirely.

use crate::error::{Error, Result};
use crate::kepler;
use std::f64::consts::PI;

/// Position of a reference point relative to the convex hull of an arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HullSide {
    /// The point lies inside the hull ("indirect", `I_O` / `I_F`).
    Indirect,
    /// The point lies outside the hull ("direct", `D_O` / `D_F`).
    Direct,
}

/// Lambert classification of an arc by its convex hull.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArcClass {
    /// Whether the hull contains the origin (`I_O` vs `D_O`).
    pub about_origin: HullSide,
    /// Whether the hull contains the second focus (`I_F` vs `D_F`).
    pub about_second_focus: HullSide,
}

/// Traversal sense of an arc at its initial collision.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArcDirection {
    /// Velocity points out of the unit circle; the arc passes its apocenter.
    Outgoing,
    /// Velocity points into the unit circle; the arc passes its pericenter.
    Ingoing,
}

/// Comparisons within this band of the case boundaries route to the
/// middle Lambert case; the branches agree there analytically.
const CASE_TIE_BAND: f64 = 1e-12;

/// Rectilinear free-fall time from apex height `Q0` down to `Q1`:
/// `sqrt(Q0^3/2) (sqrt((Q1/Q0)(1 - Q1/Q0)) + arccos(sqrt(Q1/Q0)))`.
pub fn free_fall_time(q0: f64, q1: f64) -> Result<f64> {
    if q0 <= 0.0 || q1 < 0.0 || !q0.is_finite() || !q1.is_finite() {
        return Err(Error::Domain(format!("free fall heights ({q0}, {q1}) must be positive")));
    }
    if q1 > q0 {
        return Err(Error::Domain(format!("free fall target {q1} above apex {q0}")));
    }
    let x = q1 / q0;
    Ok((q0 * q0 * q0 / 2.0).sqrt() * ((x * (1.0 - x)).max(0.0).sqrt() + x.sqrt().acos()))
}

/// Classify an arc: `I_O` iff `theta >= pi/2`, `I_F` iff `2 a eps >= cos theta`.
pub fn classify_arc(a: f64, eps: f64, theta: f64) -> Result<ArcClass> {
    if a <= 0.0 || !(0.0..=1.0).contains(&eps) || !(0.0..=PI).contains(&theta) {
        return Err(Error::Domain(format!(
            "invalid arc parameters a = {a}, eps = {eps}, theta = {theta}"
        )));
    }
    let about_origin = if theta >= PI / 2.0 { HullSide::Indirect } else { HullSide::Direct };
    let about_second_focus =
        if 2.0 * a * eps >= theta.cos() { HullSide::Indirect } else { HullSide::Direct };
    Ok(ArcClass { about_origin, about_second_focus })
}

/// Elapsed time of a second-species arc with polar collision angle
/// `theta`, `winding` full revolutions of the small body about the
/// origin, and the given traversal sense.
///
/// The windingless outgoing part is a three-case combination of
/// free-fall times from height `2a`; the ingoing part is its complement
/// in the full Kepler period.
pub fn arc_elapsed_time(a: f64, theta: f64, winding: u32, direction: ArcDirection) -> Result<f64> {
    let eps = kepler::eccentricity_from_theta(a, theta)?;
    let outgoing = outgoing_windingless_time(a, eps, theta)?;
    let winding_time = 2.0 * PI * winding as f64 * a.powf(1.5);
    match direction {
        ArcDirection::Outgoing => Ok(winding_time + outgoing),
        ArcDirection::Ingoing => Ok(winding_time + kepler::kepler_period(a)? - outgoing),
    }
}

fn outgoing_windingless_time(a: f64, eps: f64, theta: f64) -> Result<f64> {
    let c = theta.cos();
    let s = theta.sin();
    let high = free_fall_time(2.0 * a, 1.0 + s)?;
    let low = free_fall_time(2.0 * a, 1.0 - s)?;
    if c <= CASE_TIE_BAND {
        // I_O: the hull contains the origin, so the fall passes the bottom.
        let full = free_fall_time(2.0 * a, 0.0)?;
        Ok(high + full + (full - low))
    } else if c <= 2.0 * a * eps + CASE_TIE_BAND {
        Ok(high + low)
    } else {
        Ok(high - low)
    }
}

/// Elapsed time between the two unit-circle crossings of the outgoing
/// arc, via eccentric anomaly and Kepler's equation `M = E - eps sin E`.
///
/// Independent of the free-fall construction: the crossing anomalies
/// come from the true anomaly `pi - theta` through the half-angle map.
pub fn kepler_time_oracle(a: f64, eps: f64, theta: f64) -> Result<f64> {
    if a <= 0.0 || !a.is_finite() {
        return Err(Error::Domain(format!("semi-major axis {a} must be positive")));
    }
    if eps <= 0.0 || eps > 1.0 {
        return Err(Error::Domain(format!(
            "eccentricity {eps} admits no transversal unit-circle crossing"
        )));
    }
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::Domain(format!("theta {theta} outside [0, pi]")));
    }
    // Reject ellipses that never reach the unit circle.
    if a * (1.0 - eps) > 1.0 + 1e-12 || a * (1.0 + eps) < 1.0 - 1e-12 {
        return Err(Error::Domain(format!(
            "ellipse a = {a}, eps = {eps} does not cross the unit circle"
        )));
    }
    // True anomaly of the crossing, measured from pericenter.
    let f = PI - theta;
    let e_cross = 2.0 * ((1.0 - eps).sqrt() * (f / 2.0).sin()).atan2((1.0 + eps).sqrt() * (f / 2.0).cos());
    let m_cross = e_cross - eps * e_cross.sin();
    // Outgoing arc spans E in [e_cross, 2 pi - e_cross] through apocenter.
    Ok(a.powf(1.5) * 2.0 * (PI - m_cross))
}
