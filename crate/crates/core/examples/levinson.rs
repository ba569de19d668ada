// Winding of `det S` around the unit circle, once from phase tracking and
// once from the roots of `W`, against `2 (m - n_b - n_c - n_h / 2)`.
//
// ```bash
// cargo run --example levinson
// ```

use graph_scattering::gallery::{g0, g1, g2, g3, g4, seeded_gadget, RandomGadgetConfig};
use graph_scattering::levinson::levinson_check;
use graph_scattering::{Result, ToleranceConfig};

pub fn run_example() -> Result<()> {
    let tol = ToleranceConfig::default();
    let mut graphs = vec![
        ("G0".to_string(), g0()),
        ("G1(3)".to_string(), g1(3.0)),
        ("G1(1)".to_string(), g1(1.0)),
        ("G2".to_string(), g2()),
        ("G3".to_string(), g3()),
        ("G4".to_string(), g4()),
    ];
    let cfg = RandomGadgetConfig::default();
    graphs.extend((0..4).map(|s| (format!("random #{s}"), seeded_gadget(s, &cfg))));

    println!("{:<10} {:>6} {:>6} {:>6} {:>8}", "graph", "phase", "roots", "rhs", "samples");
    for (name, g) in &graphs {
        let r = levinson_check(g, &tol)?;
        println!(
            "{name:<10} {:>6} {:>6} {:>6} {:>8}{}",
            r.winding_phase,
            r.winding_closed_form,
            r.rhs,
            r.samples_used,
            if r.pass { "" } else { "  MISMATCH" }
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
