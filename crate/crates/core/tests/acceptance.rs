//! Acceptance suite: one pass/fail line per criterion with the pinned
//! tolerance and the measured time. Exits nonzero if any criterion fails.

use jetforms::verify::{run_criterion, VerifyConfig, CRITERIA};

fn main() {
    let cfg = VerifyConfig::default();
    let mut failed = Vec::new();
    for (id, _, _) in CRITERIA {
        let r = run_criterion(id, &cfg);
        println!("{}", r.line());
        for c in r.checks.iter().filter(|c| !c.passed()) {
            println!("      failing check: {} residual={:.3e} tol={:.1e} {}", c.check, c.residual, c.tolerance, c.detail);
        }
        if !r.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", CRITERIA.len());
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
