//! Runs the invariant and oracle checks at a small scale.
//!
//!     cargo run --release --example validation_suite -- [trials]

use wetwit::channel::ScenarioConfig;
use wetwit::validate::{run_validation, ValidationOptions};

fn main() -> wetwit::Result<()> {
    let trials: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(50);
    let opts = ValidationOptions {
        trials,
        ..ValidationOptions::default()
    };
    let report = run_validation(&ScenarioConfig::default(), &opts)?;
    for c in &report.checks {
        println!("{c}");
    }
    if !report.all_passed() {
        std::process::exit(2);
    }
    Ok(())
}
