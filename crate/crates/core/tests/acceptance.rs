//! Runs every acceptance criterion at full size and prints one line per criterion.
//! No test harness, so the lines show up in plain `cargo test` output.

use std::process::ExitCode;

use staircase_kvol::kvol::CandidateConfig;
use staircase_kvol::verify::{run, Level, VerifyOptions};

fn main() -> ExitCode {
    let cfg = CandidateConfig::default();
    let report = run(
        VerifyOptions {
            level: Level::Full,
            inject_fault: false,
        },
        &cfg,
    );
    for c in &report.criteria {
        println!("{}", c.line());
    }
    let mut ids: Vec<u8> = report.criteria.iter().map(|c| c.id).collect();
    ids.dedup();
    let complete = ids == (1..=9).collect::<Vec<u8>>();
    if !complete {
        println!("[FAIL] criteria run: {ids:?}, expected 1..=9");
    }

    // the harness must notice a broken intersection form
    let faulty = run(
        VerifyOptions {
            level: Level::Quick,
            inject_fault: true,
        },
        &cfg,
    );
    let caught = !faulty.passed();
    println!(
        "[{}] fault injection: perturbed intersection form fails {} of {} quick criteria",
        if caught { "PASS" } else { "FAIL" },
        faulty.criteria.iter().filter(|c| !c.passed).count(),
        faulty.criteria.len()
    );

    let failed = report.criteria.iter().filter(|c| !c.passed).count();
    println!("acceptance: {} criteria checks, {failed} failed", report.criteria.len());
    if failed == 0 && complete && caught {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
