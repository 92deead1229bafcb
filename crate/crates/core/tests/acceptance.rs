//! One line per acceptance criterion.

use std::io::Write;

use sr_conjugate::selftest::{self, SelftestConfig};

#[test]
fn acceptance() {
    let cfg = SelftestConfig::default();
    let outcomes: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = (1..=11)
            .map(|id| s.spawn(move || selftest::run_criterion(id, &cfg).unwrap()))
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    // straight to stderr so the lines show without --nocapture
    let mut err = std::io::stderr().lock();
    writeln!(err).unwrap();
    for o in &outcomes {
        writeln!(err, "{o}").unwrap();
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed).map(|o| o.id).collect();
    writeln!(err, "{} of {} criteria pass", outcomes.len() - failed.len(), outcomes.len()).unwrap();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
