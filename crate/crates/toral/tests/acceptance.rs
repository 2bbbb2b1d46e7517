//! One line per criterion; exits non-zero when any criterion fails.

use std::process::ExitCode;
use std::time::Instant;
use toral::selfcheck::criterion;

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for id in 1..=10 {
        let start = Instant::now();
        let Some(res) = criterion(id, &[1, 2]) else { continue };
        println!("{res} ({:.1}s)", start.elapsed().as_secs_f64());
        if !res.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
