//! Run the verification suite programmatically and print the checks.

use freeboundary::reports::{run, Operation, RunConfig, Status};

fn main() -> freeboundary::Result<()> {
    let surface = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "critical-catenoid".into());
    let out = std::env::temp_dir().join("freeboundary-verify");
    let cfg = RunConfig {
        surface,
        operation: Operation::Verify,
        nx: 16,
        ny: 32,
        out,
        ..RunConfig::default()
    };
    let o = run(&cfg)?;
    for c in &o.report.checks {
        let tag = match c.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Skipped => "skip",
        };
        println!("{tag} {:<40} {:>12.3e}", c.name, c.value);
    }
    println!("exit code {}", o.exit_code);
    Ok(())
}
