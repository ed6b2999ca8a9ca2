use std::process::ExitCode;

use pinwheel::verify::{run_suite, SuiteConfig};
use pinwheel::Exec;

fn main() -> ExitCode {
    let reports = run_suite(&SuiteConfig::default(), Exec::auto());
    for r in &reports {
        println!("{r}");
    }
    let failed = reports.iter().filter(|r| !r.passed).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        reports.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
