// Bound-state catalogue: roots of `W(z) = det gamma(z)`, unconfined states
// inside the disk, confined states on the gadget, half-bound states at
// `z = +-1`.
//
// ```bash
// cargo run --example bound_states
// ```

use graph_scattering::gallery::{g1, g4};
use graph_scattering::spectra::{bound_state_catalog, count_identity_check, w_polynomial};
use graph_scattering::{Result, ToleranceConfig};

pub fn run_example() -> Result<()> {
    let tol = ToleranceConfig::default();
    for (name, g) in [("G1(3)", g1(3.0)), ("G4", g4())] {
        let w = w_polynomial(&g);
        println!("{name}: W has degree {}", w.degree);
        let catalog = bound_state_catalog(&g, &tol)?;
        println!("  n_b = {}, n_c = {}, n_h = {}", catalog.n_b, catalog.n_c, catalog.n_h);
        for b in &catalog.unconfined {
            println!("  unconfined: x0 = {:.12}, E = {:.12}, N = {:.12}", b.x0, b.energy, b.norm_const);
        }
        for c in &catalog.confined {
            println!("  confined: lambda = {:.12} ({:?})", c.lambda, c.class);
        }
        for h in &catalog.half_bound {
            println!("  half-bound at x0 = {}", h.x0);
        }
        let counts = count_identity_check(&g, &tol)?;
        println!("  alpha = ({}, {}, {}), identities hold: {}", counts.alpha1, counts.alpha2, counts.alpha3, counts.pass);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
