//! Reference tables shipped with the crate, used by the verification
//! suite and available for diffing new runs against known-good output.

/// Astronomical mass ratios of the reference continuations.
pub const SUN_JUPITER: f64 = 0.000953;
pub const EARTH_MOON: f64 = 0.012143;
pub const PLUTO_CHARON: f64 = 0.108511;
pub const ASTRO_MUS: [f64; 3] = [SUN_JUPITER, EARTH_MOON, PLUTO_CHARON];
pub const NONASTRO_MUS: [f64; 2] = [0.2, 0.5];

pub const GENERATING_THETA_SCAN: &str = include_str!("../data/generating_i1_theta_scan.csv");
pub const GENERATING_THETA10: &str = include_str!("../data/generating_theta10.csv");
pub const CONTINUED_ASTRO_THETA_SCAN: &str =
    include_str!("../data/continued_astro_i1_theta_scan.csv");
pub const CONTINUED_NONASTRO_THETA_SCAN: &str =
    include_str!("../data/continued_nonastro_i1_theta_scan.csv");
pub const CONTINUED_ASTRO_THETA10: &str = include_str!("../data/continued_astro_theta10.csv");
pub const CONTINUED_NONASTRO_THETA10: &str =
    include_str!("../data/continued_nonastro_theta10.csv");

/// One generating-orbit reference row: key is `theta_deg` or `I`.
#[derive(Debug, Clone, Copy)]
pub struct GenRow {
    pub key: f64,
    pub a: f64,
    pub q0: f64,
    pub h0: f64,
    pub action: f64,
}

/// One continued-orbit reference row: `(q0, A)` per mass ratio, `None`
/// where the source marks the cell as lost ("x").
#[derive(Debug, Clone)]
pub struct ContRow {
    pub key: f64,
    pub cells: Vec<Option<(f64, f64)>>,
}

pub fn parse_generating(csv: &str) -> Vec<GenRow> {
    csv.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let v: Vec<f64> = line.split(',').map(|c| c.parse().expect("fixture number")).collect();
            GenRow { key: v[0], a: v[1], q0: v[2], h0: v[3], action: v[4] }
        })
        .collect()
}

pub fn parse_continued(csv: &str) -> Vec<ContRow> {
    csv.lines()
        .skip(1)
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let cols: Vec<&str> = line.split(',').collect();
            let key: f64 = cols[0].parse().expect("fixture key");
            let cells = cols[1..]
                .chunks(2)
                .map(|pair| match (pair[0].trim(), pair[1].trim()) {
                    ("x", _) | (_, "x") => None,
                    (q, a) => Some((
                        q.parse::<f64>().expect("fixture q0"),
                        a.parse::<f64>().expect("fixture A"),
                    )),
                })
                .collect();
            ContRow { key, cells }
        })
        .collect()
}
