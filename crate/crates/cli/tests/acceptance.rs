//! Acceptance suite: criteria 1 to 9 through the library, criterion 10
//! through the built binary. Prints one line per criterion and exits
//! non-zero if any fails.

use std::process::{Command, ExitCode};
use std::time::Instant;

use boxaffine_cli::report::{hashed_region, validate_report};
use boxaffine_core::acceptance::{run_criterion, CRITERIA};

const BIN: &str = env!("CARGO_BIN_EXE_boxaffine");

fn cli_contract() -> (bool, String) {
    let validate = Command::new(BIN).arg("validate").output().expect("run validate");
    let stdout = String::from_utf8_lossy(&validate.stdout);
    let pass_lines = stdout.lines().filter(|l| l.starts_with("[PASS]")).count();
    let validate_ok = validate.status.code() == Some(0) && pass_lines == CRITERIA.len();

    let args = ["spectrum", "--model", "aq-box", "--method", "both", "--levels", "6"];
    let runs: Vec<String> = (0..2)
        .map(|_| {
            let out = Command::new(BIN).args(args).output().expect("run spectrum");
            String::from_utf8(out.stdout).expect("utf-8 report")
        })
        .collect();
    let schema_ok = runs.iter().all(|r| validate_report(r).is_ok());
    let regions: Vec<String> = runs.iter().map(|r| hashed_region(r).unwrap_or_default()).collect();
    let identical = !regions[0].is_empty() && regions[0] == regions[1];
    (
        validate_ok && schema_ok && identical,
        format!(
            "validate exit {:?} with {pass_lines}/{} PASS lines, reports schema-valid {schema_ok}, \
             hashed regions identical {identical}",
            validate.status.code(),
            CRITERIA.len()
        ),
    )
}

fn main() -> ExitCode {
    let mut failed = 0;
    for (id, _) in CRITERIA {
        let outcome = run_criterion(id).expect("known criterion");
        println!("{outcome}");
        failed += usize::from(!outcome.passed);
    }
    let start = Instant::now();
    let (passed, detail) = cli_contract();
    println!(
        "[{}] criterion 10: command-line contract ({:.3} s) {detail}",
        if passed { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64()
    );
    failed += usize::from(!passed);
    if failed == 0 {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
