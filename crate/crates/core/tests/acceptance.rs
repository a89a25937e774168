//! Full acceptance suite: every criterion runs at its stated tolerance and
//! prints one pass/fail line (use `-- --nocapture` to watch them).

use blockpow::selftest::{run, Level, DEFAULT_SEED};

#[test]
fn acceptance_criteria() {
    let outcomes = run(Level::Full, DEFAULT_SEED);
    let mut failures = Vec::new();
    for c in &outcomes {
        println!(
            "{} {:<26} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
        if !c.passed {
            failures.push(c.name);
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
