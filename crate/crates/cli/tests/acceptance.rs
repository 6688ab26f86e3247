//! Runs every registry experiment on its default configuration and prints
//! one line per criterion. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use oy_lattice_cli::registry::REGISTRY;

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let mut failed = 0;
    for (i, entry) in REGISTRY.iter().enumerate() {
        let config = (entry.defaults)();
        let start = Instant::now();
        let line = match oy_lattice_cli::run(&config) {
            Ok(outcome) => {
                let report = outcome.report;
                let bad: Vec<String> = report
                    .checks
                    .iter()
                    .filter(|c| !c.passed)
                    .map(|c| format!("{} = {:.4e} ({})", c.name, c.measured, c.threshold))
                    .collect();
                if report.passed() {
                    format!("PASS {:>2} {}", i + 1, entry.name)
                } else {
                    failed += 1;
                    format!("FAIL {:>2} {}: {}", i + 1, entry.name, bad.join("; "))
                }
            }
            Err(e) => {
                failed += 1;
                format!("FAIL {:>2} {}: error: {e}", i + 1, entry.name)
            }
        };
        println!("{line} [{:.1}s]", start.elapsed().as_secs_f64());
    }
    println!(
        "acceptance: {} of {} criteria passed",
        REGISTRY.len() - failed,
        REGISTRY.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
