use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested configuration is a genuine singularity (e.g. the
    /// direct circular orbit of radius 1, which is stationary in the
    /// rotating frame and has no finite period).
    #[error("singular configuration: {0}")]
    Singular(String),

    /// A one-parameter solve has no solution in the admissible range.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Root bracketing failed: no sign change over the searched interval.
    #[error("no bracket: {0}")]
    NoBracket(String),

    /// A root solve ran out of iterations before reaching tolerance.
    #[error("root solve did not converge: {0}")]
    NoConvergence(String),

    /// The initial condition lies outside the Hill region for the
    /// requested energy: the momentum discriminant is negative.
    #[error("outside Hill region: q0 = {q0}, c = {c}, discriminant = {discriminant}")]
    OutsideHillRegion { q0: f64, c: f64, discriminant: f64 },

    /// Integration was abandoned close to a primary.
    #[error("collision proximity at t = {t}: distance {distance:.3e} to primary {primary}")]
    CollisionProximity { t: f64, distance: f64, primary: usize },

    /// The integrator could not maintain its tolerance.
    #[error("step size underflow at t = {t} (closest primary approach {closest:.3e})")]
    StepUnderflow { t: f64, closest: f64 },

    /// Fewer axis crossings than requested were found.
    #[error("crossing {wanted} not found: trajectory contains only {found}")]
    CrossingNotFound { wanted: usize, found: usize },

    /// Continuous angle tracking failed even after refinement.
    #[error("winding angle resolution failure: |delta| = {delta:.3} rad between samples")]
    AngleResolution { delta: f64 },

    /// An operation that requires a closed trajectory received an open one.
    #[error("open trajectory: endpoint mismatch {gap:.3e} exceeds {tol:.3e}")]
    OpenTrajectory { gap: f64, tol: f64 },

    /// Exceeded the step budget of one integration.
    #[error("integration exceeded {max_steps} steps at t = {t}")]
    MaxSteps { t: f64, max_steps: usize },
}
