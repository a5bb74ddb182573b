use std::io::Write;

use markoff_bm::report::{criterion, CriterionStatus, SelftestConfig, CRITERIA};

#[test]
fn acceptance() {
    let cfg = SelftestConfig::default();
    // Written to the raw handle so the lines survive the harness's output capture.
    let mut err = std::io::stderr().lock();
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        let out = criterion(id, &cfg);
        writeln!(err, "{out} ({} ms)", out.elapsed_ms).unwrap();
        if out.status != CriterionStatus::Pass {
            failed.push(id);
        }
    }
    assert!(failed.is_empty(), "criteria not passing: {failed:?}");
}
