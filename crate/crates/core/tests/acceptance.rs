//! Every acceptance criterion at its stated tolerance and time budget.
//! Runs without the test harness so that the verdict lines always print:
//! one line per criterion, then its details. Exits nonzero on any failure.

use std::process::ExitCode;

use besov_morrey::harness::suite::run_suite;

fn main() -> ExitCode {
    let report = run_suite(7, &[], |c| {
        println!("{}", c.line());
        for d in &c.details {
            println!("    {d}");
        }
    });
    let failed = report.criteria.iter().filter(|c| !c.passed).count();
    if report.criteria.len() != 11 || failed > 0 {
        println!("acceptance: {failed} of {} criteria failed", report.criteria.len());
        return ExitCode::FAILURE;
    }
    println!("acceptance: all {} criteria passed", report.criteria.len());
    ExitCode::SUCCESS
}
