//! The twelve acceptance criteria, one PASS/FAIL line each.
//!
//! Lines go straight to stderr so they show up without `--nocapture`.
//! Set `SCENERYWALK_SUITES=lln,metric` to run a subset.

use std::io::Write;
use std::time::Instant;

use scenerywalk::verify::{run_suite, SUITES};

const SEED: u64 = 20_240_611;

#[test]
fn acceptance_criteria() {
    let only = std::env::var("SCENERYWALK_SUITES").ok();
    let selected: Vec<&str> = SUITES
        .iter()
        .copied()
        .filter(|s| only.as_deref().is_none_or(|o| o.split(',').any(|x| x.trim() == *s)))
        .collect();
    let mut failed = Vec::new();
    for name in selected {
        let start = Instant::now();
        let report = run_suite(name, SEED).unwrap_or_else(|e| panic!("suite {name} errored: {e}"));
        let secs = start.elapsed().as_secs_f64();
        let mut err = std::io::stderr().lock();
        writeln!(err, "{} ({secs:.1} s)", report.line()).unwrap();
        if !report.passed {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
