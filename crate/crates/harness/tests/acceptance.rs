//! One line per acceptance criterion; exits nonzero if any fails.

use std::process::ExitCode;

use sqg_harness::selfcheck;

fn main() -> ExitCode {
    let scratch = tempfile::tempdir().expect("scratch directory");
    let mut failed = Vec::new();
    for (id, _) in selfcheck::CRITERIA {
        let result = selfcheck::run_criterion(id, scratch.path());
        println!("{result}");
        if !result.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", selfcheck::CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
