//! One line per acceptance criterion at the default scale.

use std::process::ExitCode;

use prismkit::selftest::{run_criterion, SelftestConfig, CRITERIA};

fn main() -> ExitCode {
    let cfg = SelftestConfig::default();
    let mut failed = Vec::new();
    for &(id, _, _) in CRITERIA.iter() {
        let r = run_criterion(id, &cfg).expect("known criterion");
        let tag = if r.passed { "PASS" } else { "FAIL" };
        println!("[{tag}] {:>2} {}: {} ({} ms)", r.id, r.name, r.detail, r.millis);
        if !r.passed {
            failed.push(r.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: {} of {} criteria passed", CRITERIA.len(), CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
