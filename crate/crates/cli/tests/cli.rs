//! End-to-end checks of the `rtbp` binary: determinism, exit codes,
//! config-file handling and dump outputs.

use std::process::Command;

fn rtbp() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rtbp"))
}

#[test]
fn gen_table_is_deterministic_and_matches_flags() {
    let args = ["gen-table", "--mode", "fixed-theta", "--theta-deg", "10", "--I", "1:3"];
    let first = rtbp().args(args).output().unwrap();
    assert!(first.status.success());
    let second = rtbp().args(args).output().unwrap();
    assert_eq!(first.stdout, second.stdout, "identical config must give identical bytes");

    let text = String::from_utf8(first.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "I,a,q0,H0,A");
    assert_eq!(lines.count(), 3);

    // The same run through a config file gives the same table.
    let dir = std::env::temp_dir().join("rtbp-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg_path = dir.join("run.cfg");
    std::fs::write(&cfg_path, "mode = fixed-theta\ntheta_deg = 10\ni = 1:3\n").unwrap();
    let via_config =
        rtbp().args(["gen-table", "--config", cfg_path.to_str().unwrap()]).output().unwrap();
    assert!(via_config.status.success());
    assert_eq!(String::from_utf8(via_config.stdout).unwrap(), text);
}

#[test]
fn usage_errors_exit_2() {
    // Missing required selectors.
    let out = rtbp().args(["gen-table"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // Config file with an unknown key.
    let dir = std::env::temp_dir().join("rtbp-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg_path = dir.join("bad.cfg");
    std::fs::write(&cfg_path, "mode = fixed-theta\ntheta_deg = 10\nbogus = 1\n").unwrap();
    let out =
        rtbp().args(["gen-table", "--config", cfg_path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    // Unknown flag is a clap usage error.
    let out = rtbp().args(["gen-table", "--what"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn continue_emits_mu_column_pairs() {
    let out = rtbp()
        .args([
            "continue",
            "--mode",
            "fixed-theta",
            "--theta-deg",
            "60",
            "--I",
            "1",
            "--mu",
            "0.001",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "I,q0[0.001],A[0.001]");
    let row = lines.next().unwrap();
    assert!(row.starts_with("1,2.36"), "row = {row}");
}

#[test]
fn orbit_dump_writes_csv_and_metadata() {
    let dir = std::env::temp_dir().join("rtbp-cli-test");
    std::fs::create_dir_all(&dir).unwrap();
    let prefix = dir.join("orbit");
    let out = rtbp()
        .args([
            "orbit-dump",
            "--theta-deg",
            "60",
            "--I",
            "1",
            "--samples",
            "64",
            "--out",
            prefix.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(prefix.with_extension("csv")).unwrap();
    assert!(csv.starts_with("t,q1,q2,p1,p2,Q1,Q2,P1,P2,H"));
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(prefix.with_extension("json")).unwrap())
            .unwrap();
    for key in ["a", "eps", "theta_deg", "I", "mu", "c", "action", "q0"] {
        assert!(meta.get(key).is_some(), "metadata key {key}");
    }
}
