// Seeded random gadgets checked against the count and Levinson identities.
//
// ```bash
// cargo run --release --example fuzz
// ```

use graph_scattering::fuzz::{run_fuzz, FuzzConfig};
use graph_scattering::gallery::RandomGadgetConfig;
use graph_scattering::{Result, ToleranceConfig};

pub fn run_example() -> Result<()> {
    let cfg = FuzzConfig { seed: 42, count: 100, gadget: RandomGadgetConfig::default() };
    let report = run_fuzz(&cfg, &ToleranceConfig::default());
    let bound: usize = report.results.iter().map(|r| r.count_identities.as_ref().map_or(0, |c| c.n_b)).sum();
    println!("{} gadgets, {} failures, {bound} unconfined bound states in total", report.instances, report.failures);
    if let Some(f) = &report.first_failure {
        println!("first failure: seed {} ({})", f.seed, f.reason);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
