//! Run configuration shared by the table commands.
//!
//! A configuration is a flat set of `key = value` lines (or the
//! equivalent command-line flags). Parsing and re-serialization are
//! idempotent: the canonical form round-trips to itself.

use anyhow::{anyhow, bail, Context, Result};
use rtbp_core::dynamics::Frame;
use std::fmt;
use std::str::FromStr;

/// Family selector of a table run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// One arc per angle at fixed revolution count.
    FixedThetaScan,
    /// One arc per revolution count at fixed angle.
    FixedTheta,
    /// One arc per revolution count at fixed semi-minor axis.
    FixedB,
    /// One arc per revolution count at fixed target energy.
    FixedEnergy,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::FixedThetaScan => "fixed-theta-scan",
            Mode::FixedTheta => "fixed-theta",
            Mode::FixedB => "fixed-b",
            Mode::FixedEnergy => "fixed-energy",
        };
        write!(f, "{s}")
    }
}

impl FromStr for Mode {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed-theta-scan" => Ok(Mode::FixedThetaScan),
            "fixed-theta" => Ok(Mode::FixedTheta),
            "fixed-b" => Ok(Mode::FixedB),
            "fixed-energy" => Ok(Mode::FixedEnergy),
            other => bail!("unknown mode '{other}'"),
        }
    }
}

/// A scalar or an inclusive `start:stop[:step]` progression.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scan {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl Scan {
    pub fn scalar(v: f64) -> Self {
        Scan { start: v, stop: v, step: 1.0 }
    }

    pub fn is_scalar(&self) -> bool {
        self.start == self.stop
    }

    pub fn values(&self) -> Vec<f64> {
        if self.is_scalar() {
            return vec![self.start];
        }
        let n = ((self.stop - self.start) / self.step).round() as i64;
        (0..=n.max(0)).map(|k| self.start + self.step * k as f64).collect()
    }
}

impl fmt::Display for Scan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_scalar() {
            write!(f, "{}", self.start)
        } else if self.step == 1.0 {
            write!(f, "{}:{}", self.start, self.stop)
        } else {
            write!(f, "{}:{}:{}", self.start, self.stop, self.step)
        }
    }
}

impl FromStr for Scan {
    type Err = anyhow::Error;
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |p: &str| -> Result<f64> {
            p.trim().parse::<f64>().with_context(|| format!("bad number '{p}' in '{s}'"))
        };
        match parts.as_slice() {
            [v] => Ok(Scan::scalar(num(v)?)),
            [a, b] => Ok(Scan { start: num(a)?, stop: num(b)?, step: 1.0 }),
            [a, b, c] => {
                let step = num(c)?;
                if step <= 0.0 {
                    bail!("scan step in '{s}' must be positive");
                }
                Ok(Scan { start: num(a)?, stop: num(b)?, step })
            }
            _ => bail!("expected 'v', 'start:stop' or 'start:stop:step', got '{s}'"),
        }
    }
}

fn frame_name(frame: Frame) -> &'static str {
    match frame {
        Frame::M1Centered => "m1",
        Frame::Barycentric => "barycentric",
    }
}

fn parse_frame(s: &str) -> Result<Frame> {
    match s {
        "m1" => Ok(Frame::M1Centered),
        "barycentric" => Ok(Frame::Barycentric),
        other => bail!("unknown frame '{other}' (expected m1 or barycentric)"),
    }
}

/// Flat key-value configuration of one table run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub theta_deg: Option<Scan>,
    pub revs: Scan,
    pub b: Option<f64>,
    pub c0: Option<f64>,
    pub mu: Vec<f64>,
    pub frame: Frame,
    pub rtol: f64,
    pub atol: f64,
    pub out: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mode: Mode::FixedTheta,
            theta_deg: None,
            revs: Scan::scalar(1.0),
            b: None,
            c0: None,
            mu: Vec::new(),
            frame: Frame::Barycentric,
            rtol: 1e-12,
            atol: 1e-12,
            out: None,
        }
    }
}

impl RunConfig {
    /// Canonical flat text form; parsing it again gives back `self`.
    pub fn to_canonical(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        put("mode", self.mode.to_string());
        if let Some(t) = &self.theta_deg {
            put("theta_deg", t.to_string());
        }
        put("i", self.revs.to_string());
        if let Some(b) = self.b {
            put("b", b.to_string());
        }
        if let Some(c0) = self.c0 {
            put("c0", c0.to_string());
        }
        if !self.mu.is_empty() {
            put("mu", self.mu.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(","));
        }
        put("frame", frame_name(self.frame).to_string());
        put("rtol", self.rtol.to_string());
        put("atol", self.atol.to_string());
        if let Some(o) = &self.out {
            put("out", o.clone());
        }
        out
    }

    /// Parse the flat `key = value` form. Unknown keys are rejected;
    /// `#` starts a comment.
    pub fn from_flat(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        let mut saw_mode = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected 'key = value'", lineno + 1))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "mode" => {
                    cfg.mode = value.parse()?;
                    saw_mode = true;
                }
                "theta_deg" => cfg.theta_deg = Some(value.parse()?),
                "i" => cfg.revs = value.parse()?,
                "b" => cfg.b = Some(value.parse()?),
                "c0" => cfg.c0 = Some(value.parse()?),
                "mu" => {
                    cfg.mu = value
                        .split(',')
                        .map(|m| m.trim().parse::<f64>().map_err(|e| anyhow!("mu '{m}': {e}")))
                        .collect::<Result<_>>()?;
                }
                "frame" => cfg.frame = parse_frame(value)?,
                "rtol" => cfg.rtol = value.parse()?,
                "atol" => cfg.atol = value.parse()?,
                "out" => cfg.out = Some(value.to_string()),
                other => bail!("line {}: unknown key '{other}'", lineno + 1),
            }
        }
        if !saw_mode {
            bail!("config is missing the 'mode' key");
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Check mode-specific requirements.
    pub fn validate(&self) -> Result<()> {
        match self.mode {
            Mode::FixedThetaScan => {
                let t = self.theta_deg.ok_or_else(|| anyhow!("fixed-theta-scan needs theta_deg"))?;
                if !self.revs.is_scalar() {
                    bail!("fixed-theta-scan takes a single I");
                }
                if t.is_scalar() {
                    bail!("fixed-theta-scan needs a theta_deg range, e.g. 0:180:10");
                }
            }
            Mode::FixedTheta => {
                let t = self.theta_deg.ok_or_else(|| anyhow!("fixed-theta needs theta_deg"))?;
                if !t.is_scalar() {
                    bail!("fixed-theta takes a single theta_deg; use fixed-theta-scan for ranges");
                }
            }
            Mode::FixedB => {
                if self.b.is_none() {
                    bail!("fixed-b needs b");
                }
            }
            Mode::FixedEnergy => {
                if self.c0.is_none() {
                    bail!("fixed-energy needs c0");
                }
            }
        }
        for &i in &self.revs.values() {
            if i < 1.0 || i.fract() != 0.0 {
                bail!("revolution counts must be positive integers, got {i}");
            }
        }
        for &m in &self.mu {
            if !(0.0..1.0).contains(&m) {
                bail!("mass ratio {m} outside [0, 1)");
            }
        }
        Ok(())
    }

    pub fn rev_values(&self) -> Vec<u32> {
        self.revs.values().into_iter().map(|v| v as u32).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_parsing_and_display() {
        let s: Scan = "0:180:10".parse().unwrap();
        assert_eq!(s.values().len(), 19);
        assert_eq!(s.to_string(), "0:180:10");
        let s: Scan = "1:20".parse().unwrap();
        assert_eq!(s.values().len(), 20);
        assert_eq!(s.to_string(), "1:20");
        let s: Scan = "42".parse().unwrap();
        assert!(s.is_scalar());
        assert_eq!(s.to_string(), "42");
        assert!("1:2:0".parse::<Scan>().is_err());
        assert!("a:b".parse::<Scan>().is_err());
    }

    #[test]
    fn canonical_roundtrip() {
        let text = "mode = fixed-theta-scan\ntheta_deg = 0:180:10\ni = 1\nmu = 0.000953,0.012143\n";
        let cfg = RunConfig::from_flat(text).unwrap();
        let canon = cfg.to_canonical();
        let cfg2 = RunConfig::from_flat(&canon).unwrap();
        assert_eq!(cfg, cfg2);
        assert_eq!(canon, cfg2.to_canonical());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::from_flat("mode = fixed-theta\ntheta_deg = 10\nwhat = 1\n").is_err());
        assert!(RunConfig::from_flat("theta_deg = 10\n").is_err());
    }

    #[test]
    fn mode_requirements() {
        assert!(RunConfig::from_flat("mode = fixed-theta-scan\ntheta_deg = 10\ni = 1\n").is_err());
        assert!(RunConfig::from_flat("mode = fixed-b\ni = 1:5\n").is_err());
        assert!(RunConfig::from_flat("mode = fixed-theta\ntheta_deg = 10\ni = 0:5\n").is_err());
        assert!(RunConfig::from_flat("mode = fixed-theta\ntheta_deg = 10\nmu = 1.5\n").is_err());
    }
}
