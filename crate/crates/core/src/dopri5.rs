//! Embedded Dormand-Prince 5(4) integrator with 4th-order dense output
//! and PI step-size control, specialized to the 4-dimensional rotating
//! frame phase space.
//!
//! Stage evaluations may fail (collision guard); a failed trial step is
//! retried with a smaller step until the step size underflows.

use crate::error::{Error, Result};

pub(crate) type State = [f64; 4];

pub(crate) fn axpy(y: &State, h: f64, mut terms: impl FnMut(usize) -> f64) -> State {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        *o += h * terms(i);
    }
    out
}

// Butcher tableau of the Dormand-Prince 5(4) pair.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// b - b_hat, error estimator weights (7 stages, FSAL).
const ER: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// Dense output weights.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

/// One accepted step with its dense-output interpolant, valid for
/// `t in [t0, t0 + h]` (or the reverse interval for negative `h`).
#[derive(Debug, Clone)]
pub(crate) struct DenseSegment {
    pub t0: f64,
    pub h: f64,
    rcont: [State; 5],
}

impl DenseSegment {
    pub fn t_end(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn eval(&self, t: f64) -> State {
        self.eval_theta((t - self.t0) / self.h)
    }

    /// Interpolant at fractional position `theta in [0, 1]`.
    pub fn eval_theta(&self, theta: f64) -> State {
        let [r1, r2, r3, r4, r5] = &self.rcont;
        let mut out = [0.0; 4];
        let om = 1.0 - theta;
        for i in 0..4 {
            out[i] = r1[i] + theta * (r2[i] + om * (r3[i] + theta * (r4[i] + om * r5[i])));
        }
        out
    }

    /// Time derivative of the interpolant at fractional position `theta`.
    pub fn derivative_theta(&self, theta: f64) -> State {
        let [_, r2, r3, r4, r5] = &self.rcont;
        let mut out = [0.0; 4];
        for i in 0..4 {
            let d = r2[i]
                + (1.0 - 2.0 * theta) * r3[i]
                + theta * (2.0 - 3.0 * theta) * r4[i]
                + theta * (2.0 - 6.0 * theta + 4.0 * theta * theta) * r5[i];
            out[i] = d / self.h;
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Stats {
    pub steps: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Options {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { rtol: 1e-12, atol: 1e-12, h_max: f64::INFINITY, max_steps: 20_000_000 }
    }
}

/// Whether to keep integrating after an accepted step.
pub(crate) enum StepFlow {
    Continue,
    /// Stop before `t_end`; the driver records the requested final time,
    /// which must lie inside the segment just produced.
    Stop { t: f64 },
}

pub(crate) struct Outcome {
    pub t_end: f64,
    pub y_end: State,
    pub stats: Stats,
}

/// Integrate `dy/dt = f(t, y)` from `t0` to `t_end` (either direction),
/// invoking `on_step` with every accepted dense segment. The callback
/// may stop the run early (event detection); in that case `y_end` is the
/// dense-output state at the reported time.
pub(crate) fn integrate<F, S>(
    mut f: F,
    t0: f64,
    y0: State,
    t_end: f64,
    opts: &Options,
    mut on_step: S,
) -> Result<Outcome>
where
    F: FnMut(f64, &State) -> Result<State>,
    S: FnMut(&DenseSegment) -> Result<StepFlow>,
{
    let posneg = (t_end - t0).signum();
    if posneg == 0.0 || !t_end.is_finite() {
        return Ok(Outcome { t_end: t0, y_end: y0, stats: Stats::default() });
    }

    let mut stats = Stats::default();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y)?;
    stats.evals += 1;

    let scale = |y0: &State, y1: &State, i: usize| {
        opts.atol + opts.rtol * y0[i].abs().max(y1[i].abs())
    };

    // Initial step size (Hairer's hinit, simplified).
    let mut h = {
        let mut dnf = 0.0;
        let mut dny = 0.0;
        for i in 0..4 {
            let sc = scale(&y, &y, i);
            dnf += (k1[i] / sc).powi(2);
            dny += (y[i] / sc).powi(2);
        }
        let h0 = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { 0.01 * (dny / dnf).sqrt() };
        let h0 = h0.min((t_end - t0).abs()).min(opts.h_max);
        let y1 = axpy(&y, h0 * posneg, |i| k1[i]);
        match f(t + h0 * posneg, &y1) {
            Ok(f1) => {
                stats.evals += 1;
                let mut der2 = 0.0;
                for i in 0..4 {
                    let sc = scale(&y, &y, i);
                    der2 += ((f1[i] - k1[i]) / sc).powi(2);
                }
                let der12 = (der2.sqrt() / h0).max(dnf.sqrt());
                let h1 = if der12 <= 1e-15 {
                    (h0 * 1e-3).max(1e-6)
                } else {
                    (0.01 / der12).powf(0.2)
                };
                (100.0 * h0).min(h1).min((t_end - t0).abs()).min(opts.h_max) * posneg
            }
            Err(_) => 1e-6 * posneg,
        }
    };

    let expo1 = 0.2 - 0.04 * 0.75;
    let mut facold: f64 = 1e-4;

    loop {
        if stats.steps >= opts.max_steps {
            return Err(Error::MaxSteps { t, max_steps: opts.max_steps });
        }
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            // The caller knows the closest primary approach; it rewrites this.
            return Err(Error::StepUnderflow { t, closest: f64::NAN });
        }
        // Do not step past the end point.
        let mut last = false;
        if (t + 1.01 * h - t_end) * posneg > 0.0 {
            h = t_end - t;
            last = true;
        }
        stats.steps += 1;

        // Stage evaluations; a guard failure rejects the trial step.
        let stages = (|| -> Result<([State; 7], State)> {
            let k2 = f(t + C[1] * h, &axpy(&y, h, |i| A2[0] * k1[i]))?;
            let k3 = f(t + C[2] * h, &axpy(&y, h, |i| A3[0] * k1[i] + A3[1] * k2[i]))?;
            let k4 =
                f(t + C[3] * h, &axpy(&y, h, |i| A4[0] * k1[i] + A4[1] * k2[i] + A4[2] * k3[i]))?;
            let k5 = f(
                t + C[4] * h,
                &axpy(&y, h, |i| A5[0] * k1[i] + A5[1] * k2[i] + A5[2] * k3[i] + A5[3] * k4[i]),
            )?;
            let ysti = axpy(&y, h, |i| {
                A6[0] * k1[i] + A6[1] * k2[i] + A6[2] * k3[i] + A6[3] * k4[i] + A6[4] * k5[i]
            });
            let k6 = f(t + C[5] * h, &ysti)?;
            let ynew = axpy(&y, h, |i| {
                B[0] * k1[i] + B[2] * k3[i] + B[3] * k4[i] + B[4] * k5[i] + B[5] * k6[i]
            });
            let k7 = f(t + C[6] * h, &ynew)?;
            Ok(([k1, k2, k3, k4, k5, k6, k7], ynew))
        })();
        stats.evals += 6;

        let (k, ynew) = match stages {
            Ok(v) => v,
            Err(e) => {
                // Retry with a smaller step unless it has already underflowed.
                if h.abs() < 1e-13 * t.abs().max(1.0) {
                    return Err(e);
                }
                h *= 0.25;
                stats.rejected += 1;
                continue;
            }
        };

        let mut err = 0.0;
        for i in 0..4 {
            let e: f64 = h * (0..7).map(|s| ER[s] * k[s][i]).sum::<f64>();
            let sc = scale(&y, &ynew, i);
            err += (e / sc).powi(2);
        }
        let err = (err / 4.0).sqrt();
        if !err.is_finite() {
            h *= 0.25;
            stats.rejected += 1;
            continue;
        }

        let fac11 = err.powf(expo1);
        if err <= 1.0 {
            // Accept; build dense output.
            stats.accepted += 1;

            let mut rcont = [[0.0; 4]; 5];
            for i in 0..4 {
                let ydiff = ynew[i] - y[i];
                let bspl = h * k[0][i] - ydiff;
                rcont[0][i] = y[i];
                rcont[1][i] = ydiff;
                rcont[2][i] = bspl;
                rcont[3][i] = ydiff - h * k[6][i] - bspl;
                rcont[4][i] = h * (0..7).map(|s| D[s] * k[s][i]).sum::<f64>();
            }
            let segment = DenseSegment { t0: t, h, rcont };

            match on_step(&segment)? {
                StepFlow::Continue => {}
                StepFlow::Stop { t: t_stop } => {
                    let y_stop = segment.eval(t_stop);
                    return Ok(Outcome { t_end: t_stop, y_end: y_stop, stats });
                }
            }

            k1 = k[6]; // FSAL
            t += h;
            y = ynew;
            if last || (t - t_end) * posneg >= 0.0 {
                return Ok(Outcome { t_end: t, y_end: y, stats });
            }
            let fac = (fac11 / facold.powf(0.04) / 0.9).clamp(0.1, 5.0);
            facold = err.max(1e-4);
            h /= fac;
            if h.abs() > opts.h_max {
                h = opts.h_max * posneg;
            }
        } else {
            stats.rejected += 1;
            h /= (fac11 / 0.9).min(5.0);
        }
    }
}
