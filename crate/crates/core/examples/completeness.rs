// Resolution of the identity on a vertex window: scattering states over
// `k in (-pi, 0)` plus bound states.
//
// ```bash
// cargo run --example completeness
// ```

use graph_scattering::completeness::{completeness_defect, scattering_overlap_integral};
use graph_scattering::gallery::{g0, g1, g4};
use graph_scattering::quadrature::QuadratureConfig;
use graph_scattering::smatrix::Vertex;
use graph_scattering::{Result, ToleranceConfig};

pub fn run_example() -> Result<()> {
    let tol = ToleranceConfig::default();
    let quad = QuadratureConfig::with_target(1e-10);

    // the bound state of G1(3) carries 8/9 of the attachment vertex
    let v = Vertex::Path { path: 0, x: 1 };
    let overlap = scattering_overlap_integral(&g1(3.0), v, v, &quad, &tol)?;
    println!("G1(3) scattering weight at the attachment: {:.12} (1/9 = {:.12})", overlap.value.re, 1.0 / 9.0);

    for (name, g) in [("G0", g0()), ("G1(3)", g1(3.0)), ("G4", g4())] {
        let r = completeness_defect(&g, 6, &quad, &tol)?;
        println!(
            "{name:<6} window {:>2}  max deviation {:.2e}  (accept {:.0e})  panels {}  excluded {:?}",
            r.window.len(),
            r.max_deviation,
            r.acceptance_tolerance,
            r.quad_panels,
            r.excluded_energies
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
