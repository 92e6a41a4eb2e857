//! Implementations of the table, continuation and dump commands.

use crate::config::{Mode, RunConfig};
use crate::tables::{fmt17, fmt6, fmt_key, TableWriter};
use anyhow::{anyhow, bail, Result};
use rtbp_core::arcs::{self, GeneratingArc, SequenceMode, SequenceSpec};
use rtbp_core::continuation::{self, ArcSweep, SweepOptions};
use rtbp_core::dynamics::{
    self, Frame, IntegrateOptions, ModelParams, PhaseState, StopCondition, Trajectory,
};
use rtbp_core::Rotation;
use serde::Serialize;
use std::f64::consts::PI;

fn integrate_options(cfg: &RunConfig) -> IntegrateOptions {
    IntegrateOptions { rtol: cfg.rtol, atol: cfg.atol, ..Default::default() }
}

/// Arcs of one run, ordered as the output rows, with the scan key
/// (degrees or revolution count) attached. Infeasible entries carry the
/// diagnostic instead of an arc.
pub fn resolve_arcs(cfg: &RunConfig) -> Result<Vec<(f64, std::result::Result<GeneratingArc, String>)>> {
    let mut out = Vec::new();
    match cfg.mode {
        Mode::FixedThetaScan => {
            let revs = cfg.rev_values()[0];
            for deg in cfg.theta_deg.expect("validated").values() {
                let arc = arcs::arc_for_theta(deg.to_radians(), revs, Rotation::Direct)
                    .map_err(|e| e.to_string());
                out.push((deg, arc));
            }
        }
        Mode::FixedTheta => {
            let theta = cfg.theta_deg.expect("validated").start.to_radians();
            let spec = SequenceSpec {
                mode: SequenceMode::FixedTheta { theta },
                revs_m2: range_of(cfg),
                rotation: Rotation::Direct,
            };
            out = keyed_sequence(&spec);
        }
        Mode::FixedB => {
            let spec = SequenceSpec {
                mode: SequenceMode::FixedB { b: cfg.b.expect("validated") },
                revs_m2: range_of(cfg),
                rotation: Rotation::Direct,
            };
            out = keyed_sequence(&spec);
        }
        Mode::FixedEnergy => {
            let spec = SequenceSpec {
                mode: SequenceMode::FixedEnergy { c0: cfg.c0.expect("validated"), theta_window: None },
                revs_m2: range_of(cfg),
                rotation: Rotation::Direct,
            };
            out = keyed_sequence(&spec);
        }
    }
    Ok(out)
}

fn range_of(cfg: &RunConfig) -> std::ops::RangeInclusive<u32> {
    let revs = cfg.rev_values();
    *revs.first().unwrap()..=*revs.last().unwrap()
}

fn keyed_sequence(spec: &SequenceSpec) -> Vec<(f64, std::result::Result<GeneratingArc, String>)> {
    let outcome = arcs::build_sequence(spec);
    let mut out: Vec<(f64, std::result::Result<GeneratingArc, String>)> = Vec::new();
    for arc in outcome.arcs {
        out.push((arc.revs_m2 as f64, Ok(arc)));
    }
    for (i, err) in outcome.skipped {
        out.push((i as f64, Err(err.to_string())));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

/// `gen-table`: one CSV row per arc of the selected family.
pub fn gen_table(cfg: &RunConfig) -> Result<String> {
    let key_name = if cfg.mode == Mode::FixedThetaScan { "theta_deg" } else { "I" };
    let mut w = TableWriter::new(&[key_name, "a", "q0", "H0", "A"]);
    for (key, arc) in resolve_arcs(cfg)? {
        match arc {
            Ok(arc) => w.row(&[
                fmt_key(key),
                fmt6(arc.ellipse.a),
                fmt6(arc.q0()),
                fmt6(arc.h0),
                fmt6(arc.action),
            ]),
            Err(_) => w.row(&[
                fmt_key(key),
                "x".to_string(),
                "x".to_string(),
                "x".to_string(),
                "x".to_string(),
            ]),
        }
    }
    Ok(w.finish())
}

/// Full result of a continuation run: the reference-style table plus
/// the certificate details per cell.
pub struct ContinueOutput {
    pub table: String,
    pub details: serde_json::Value,
}

#[derive(Serialize)]
struct CellDetail {
    mu: f64,
    found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    q0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    q0_abscissa: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    action: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rot: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    w1: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    w2: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    beta0: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closure_gap: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    energy_drift: Option<f64>,
}

/// `continue`: per mass ratio a `(q0, A)` column pair, with lost cells
/// rendered as the literal "x" to stay diffable against the reference
/// tables.
pub fn continue_table(cfg: &RunConfig) -> Result<ContinueOutput> {
    if cfg.mu.is_empty() {
        bail!("continue needs at least one mass ratio (--mu)");
    }
    let mut mus = cfg.mu.clone();
    mus.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if mus.windows(2).any(|w| w[0] == w[1]) {
        bail!("duplicate mass ratios in --mu");
    }

    let keyed = resolve_arcs(cfg)?;
    let arcs: Vec<GeneratingArc> =
        keyed.iter().filter_map(|(_, a)| a.as_ref().ok().cloned()).collect();
    let sweep_opts = SweepOptions {
        frame: cfg.frame,
        mus: mus.clone(),
        integrate: integrate_options(cfg),
        parallel: true,
    };
    let sweeps = continuation::continuation_sweep(&arcs, &sweep_opts);

    let key_name = if cfg.mode == Mode::FixedThetaScan { "theta_deg" } else { "I" };
    let mut header: Vec<String> = vec![key_name.to_string()];
    for mu in &mus {
        header.push(format!("q0[{mu}]"));
        header.push(format!("A[{mu}]"));
    }
    let header_refs: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut w = TableWriter::new(&header_refs);

    let mut details = Vec::new();
    let mut sweep_iter = sweeps.iter();
    for (key, arc) in &keyed {
        let mut cells = vec![fmt_key(*key)];
        match arc {
            Ok(_) => {
                let sweep: &ArcSweep = sweep_iter.next().expect("one sweep per resolved arc");
                let mut cell_details = Vec::new();
                for (mu, cell) in &sweep.cells {
                    match cell {
                        Some(row) => {
                            cells.push(fmt6(row.q0_distance));
                            cells.push(fmt6(row.action));
                            cell_details.push(CellDetail {
                                mu: *mu,
                                found: true,
                                q0: Some(row.q0_distance),
                                q0_abscissa: Some(row.q0_abscissa),
                                action: Some(row.action),
                                rot: Some(row.rot),
                                w1: Some(row.w1),
                                w2: Some(row.w2),
                                beta0: Some(row.beta0),
                                closure_gap: Some(row.closure_gap),
                                energy_drift: Some(row.energy_drift),
                            });
                        }
                        None => {
                            cells.push("x".to_string());
                            cells.push("x".to_string());
                            cell_details.push(CellDetail {
                                mu: *mu,
                                found: false,
                                q0: None,
                                q0_abscissa: None,
                                action: None,
                                rot: None,
                                w1: None,
                                w2: None,
                                beta0: None,
                                closure_gap: None,
                                energy_drift: None,
                            });
                        }
                    }
                }
                details.push(serde_json::json!({
                    "key": key,
                    "a": sweep.arc.ellipse.a,
                    "H0": sweep.arc.h0,
                    "crossing_index": sweep.crossing_index,
                    "cells": cell_details,
                    "notes": sweep.notes,
                }));
            }
            Err(e) => {
                for _ in &mus {
                    cells.push("x".to_string());
                    cells.push("x".to_string());
                }
                details.push(serde_json::json!({ "key": key, "infeasible": e }));
            }
        }
        w.row(&cells);
    }

    Ok(ContinueOutput { table: w.finish(), details: serde_json::Value::Array(details) })
}

/// Result of `orbit-dump`: trajectory CSV in both frames plus metadata.
pub struct DumpOutput {
    pub csv: String,
    pub metadata: serde_json::Value,
}

pub struct DumpRequest {
    pub theta_deg: f64,
    pub revs: u32,
    pub mu: f64,
    pub frame: Frame,
    pub rtol: f64,
    pub atol: f64,
    pub samples: usize,
}

/// Resolve an orbit (generating at `mu = 0`, continued otherwise) and
/// emit rotating-frame and fixed-frame samples with the energy column.
pub fn orbit_dump(req: &DumpRequest) -> Result<DumpOutput> {
    let arc = arcs::arc_for_theta(req.theta_deg.to_radians(), req.revs, Rotation::Direct)
        .map_err(|e| anyhow!("arc construction failed: {e}"))?;
    let options = IntegrateOptions { rtol: req.rtol, atol: req.atol, ..Default::default() };

    let (trajectories, action, beta0, q0, params) = if req.mu == 0.0 {
        // Generating orbit: forward half plus its reflection (the flow
        // itself has a corner at the collision, so the second half is
        // the mirror image of the first).
        let params = ModelParams::new(0.0, req.frame).map_err(|e| anyhow!("{e}"))?;
        let half = continuation::generating_half_trajectory(&arc, req.frame, &options)
            .map_err(|e| anyhow!("integration failed: {e}"))?;
        let action = continuation::half_orbit_action_doubled(&half);
        let (x0, _) = continuation::generating_start(&arc, &params);
        (vec![half], action, None, x0, params)
    } else {
        let params = ModelParams::new(req.mu, req.frame).map_err(|e| anyhow!("{e}"))?;
        let sweep_opts = SweepOptions {
            frame: req.frame,
            mus: vec![req.mu],
            integrate: options,
            parallel: false,
        };
        let sweeps = continuation::continuation_sweep(std::slice::from_ref(&arc), &sweep_opts);
        let row = sweeps[0]
            .cells
            .first()
            .and_then(|(_, c)| c.clone())
            .ok_or_else(|| anyhow!("no continued orbit found at mu = {}: {:?}", req.mu, sweeps[0].notes))?;
        let p2 = dynamics::p2_from_energy(
            row.q0_abscissa,
            arc.h0,
            &params,
            rtbp_core::dynamics::MomentumBranch::direct_from(row.q0_abscissa),
        )
        .map_err(|e| anyhow!("{e}"))?;
        let start = PhaseState::new(row.q0_abscissa, 0.0, 0.0, p2, 0.0);
        let half = dynamics::integrate(
            &start,
            &params,
            StopCondition::AxisCrossing {
                count: sweeps[0].crossing_index,
                t_max: arc.tau * 1.5 + 5.0,
            },
            &options,
        )
        .map_err(|e| anyhow!("{e}"))?;
        let full = dynamics::integrate(
            &start,
            &params,
            StopCondition::TimeEnd(2.0 * half.t_end()),
            &options,
        )
        .map_err(|e| anyhow!("{e}"))?;
        (vec![full], row.action, Some(row.beta0), row.q0_abscissa, params)
    };

    let mut csv = String::from("t,q1,q2,p1,p2,Q1,Q2,P1,P2,H\n");
    for traj in &trajectories {
        append_samples(&mut csv, traj, &params, req.samples)?;
        if req.mu == 0.0 {
            append_reflected_samples(&mut csv, traj, &params, req.samples)?;
        }
    }

    let metadata = serde_json::json!({
        "a": arc.ellipse.a,
        "eps": arc.ellipse.eps,
        "theta_deg": req.theta_deg,
        "I": req.revs,
        "J": arc.revs_m3,
        "mu": req.mu,
        "c": arc.h0,
        "tau": arc.tau,
        "sigma": arc.sigma,
        "action": action,
        "beta0": beta0,
        "q0": q0.abs(),
        "q0_abscissa": q0,
        "frame": params.frame.to_string(),
    });
    Ok(DumpOutput { csv, metadata })
}

fn append_samples(
    csv: &mut String,
    traj: &Trajectory,
    params: &ModelParams,
    samples: usize,
) -> Result<()> {
    for s in traj.sample_uniform(samples).map_err(|e| anyhow!("{e}"))? {
        push_sample_row(csv, &s, params);
    }
    Ok(())
}

/// Second half of a generating orbit: reflect the first half and run it
/// backwards in time beyond the collision instant.
fn append_reflected_samples(
    csv: &mut String,
    half: &Trajectory,
    params: &ModelParams,
    samples: usize,
) -> Result<()> {
    let t_half = half.t_end();
    for k in 0..=samples {
        let t_src = t_half - t_half * k as f64 / samples as f64;
        let s = half.state_at(t_src).map_err(|e| anyhow!("{e}"))?;
        let reflected = PhaseState::new(s.q1, -s.q2, -s.p1, s.p2, 2.0 * t_half - t_src);
        push_sample_row(csv, &reflected, params);
    }
    Ok(())
}

fn push_sample_row(csv: &mut String, s: &PhaseState, params: &ModelParams) {
    let h = dynamics::hamiltonian(s, params).unwrap_or(f64::NAN);
    let (sin_t, cos_t) = s.t.sin_cos();
    let big_q1 = s.q1 * cos_t - s.q2 * sin_t;
    let big_q2 = s.q1 * sin_t + s.q2 * cos_t;
    let big_p1 = s.p1 * cos_t - s.p2 * sin_t;
    let big_p2 = s.p1 * sin_t + s.p2 * cos_t;
    for (i, v) in [s.t, s.q1, s.q2, s.p1, s.p2, big_q1, big_q2, big_p1, big_p2, h]
        .into_iter()
        .enumerate()
    {
        if i > 0 {
            csv.push(',');
        }
        csv.push_str(&fmt17(v));
    }
    csv.push('\n');
}

/// Collision endpoints of a generating arc sit at polar angle
/// `+-theta` on the unit circle in fixed coordinates; used by tests.
pub fn fixed_frame_collision_angle(arc: &GeneratingArc) -> f64 {
    arc.ellipse.theta * 180.0 / PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Scan;
    use approx::assert_abs_diff_eq;

    fn theta_scan_config() -> RunConfig {
        RunConfig {
            mode: Mode::FixedThetaScan,
            theta_deg: Some("0:180:30".parse::<Scan>().unwrap()),
            revs: Scan::scalar(1.0),
            ..Default::default()
        }
    }

    #[test]
    fn gen_table_shape_and_determinism() {
        let cfg = theta_scan_config();
        let a = gen_table(&cfg).unwrap();
        let b = gen_table(&cfg).unwrap();
        assert_eq!(a, b);
        let lines: Vec<&str> = a.lines().collect();
        assert_eq!(lines[0], "theta_deg,a,q0,H0,A");
        assert_eq!(lines.len(), 8);
        // First row: the rectilinear arc. Printed digits can differ from
        // the reference in the last place, so compare as numbers.
        let row: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
        for (got, want) in row.iter().zip([0.0, 1.114891, 2.229783, -0.448474, 1.434641]) {
            assert_abs_diff_eq!(*got, want, epsilon = 5e-6);
        }
    }

    #[test]
    fn gen_table_fixed_energy_marks_infeasible_rows() {
        let cfg = RunConfig {
            mode: Mode::FixedEnergy,
            c0: Some(-0.1),
            revs: "10:13".parse().unwrap(),
            ..Default::default()
        };
        let table = gen_table(&cfg).unwrap();
        assert!(table.lines().any(|l| l.contains(",x,x,x,x")));
        assert!(table.lines().any(|l| l.contains("13,")));
    }

    #[test]
    fn dump_has_constant_energy_and_collision_endpoints() {
        let req = DumpRequest {
            theta_deg: 60.0,
            revs: 1,
            mu: 0.0,
            frame: Frame::Barycentric,
            rtol: 1e-12,
            atol: 1e-12,
            samples: 200,
        };
        let out = orbit_dump(&req).unwrap();
        let lines: Vec<&str> = out.csv.lines().collect();
        assert_eq!(lines[0], "t,q1,q2,p1,p2,Q1,Q2,P1,P2,H");
        let c = out.metadata["c"].as_f64().unwrap();
        for line in &lines[1..] {
            let h: f64 = line.split(',').nth(9).unwrap().parse().unwrap();
            assert_abs_diff_eq!(h, c, epsilon = 1e-9);
        }
        // The halves meet at the collision point on the unit circle at
        // fixed polar angle theta (modulo full turns of the frame).
        let mid: Vec<f64> =
            lines[201].split(',').map(|v| v.parse().unwrap()).collect();
        let r = (mid[1] * mid[1] + mid[2] * mid[2]).sqrt();
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-6);
        assert!(out.metadata["beta0"].is_null());
    }
}
