use std::process::ExitCode;
use std::time::Instant;

use kipq_core::verify::{run_all, VerifyOptions};

fn main() -> ExitCode {
    let start = Instant::now();
    let reports = run_all(&VerifyOptions::default());
    let mut failed = 0;
    for r in &reports {
        println!("{}", r.line());
        if !r.passed() {
            failed += 1;
        }
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1} s",
        reports.len() - failed,
        reports.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
