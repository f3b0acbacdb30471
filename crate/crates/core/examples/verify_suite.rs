//! Run the registered checks programmatically and print the JSON report.

use softqed::harness::commands::verify;
use softqed::harness::config::SuiteConfig;

fn main() -> softqed::Result<()> {
    let cfg = SuiteConfig::from_json(r#"{"seed": 7, "samples": {"ward": 20, "gauge_pairs": 100}}"#)?;
    let report = verify(&cfg);
    for c in &report.checks {
        println!("{:<5} {:<28} {:.3e} ≤ {:.1e}", if c.passed { "ok" } else { "FAIL" }, c.name, c.residual, c.tolerance);
    }
    println!("{}/{} passed", report.summary.passed, report.summary.total);
    Ok(())
}
