//! Acceptance suite: runs every verification criterion at its stated
//! tolerance and prints one pass/fail line per criterion.

use rtbp_cli::verify;

#[test]
fn acceptance_criteria() {
    let criteria = verify::run_all();
    assert_eq!(criteria.len(), 12);
    for c in &criteria {
        println!("{}", c.report_line());
    }
    let failed: Vec<String> =
        criteria.iter().filter(|c| !c.passed).map(|c| c.report_line()).collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}
