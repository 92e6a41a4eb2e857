//! Deterministic CSV emission for the table commands.

/// Six-decimal table formatting; negative zero is normalized so that
/// identical configurations render byte-identical output.
pub fn fmt6(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

/// Full-precision formatting for dumps: 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Shortest round-trip decimal, for keys like angles in degrees.
pub fn fmt_key(v: f64) -> String {
    format!("{v}")
}

pub struct TableWriter {
    out: String,
}

impl TableWriter {
    pub fn new(header: &[&str]) -> Self {
        TableWriter { out: format!("{}\n", header.join(",")) }
    }

    pub fn row(&mut self, cells: &[String]) {
        self.out.push_str(&cells.join(","));
        self.out.push('\n');
    }

    pub fn finish(self) -> String {
        self.out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting() {
        assert_eq!(fmt6(1.4346414), "1.434641");
        assert_eq!(fmt6(-1e-9), "0.000000");
        assert_eq!(fmt_key(10.0), "10");
        assert_eq!(fmt_key(12.5), "12.5");
        assert!(fmt17(0.1).starts_with("1.000000000000000"));
    }
}
