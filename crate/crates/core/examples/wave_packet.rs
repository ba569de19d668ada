// A Gaussian packet sent into a gadget on a truncated lattice; the
// probabilities it leaves along each path approach `|S_{j' j}(k0)|^2`.
//
// ```bash
// cargo run --release --example wave_packet
// ```

use std::f64::consts::PI;

use graph_scattering::dynamics::{TruncatedLattice, WavePacketParams};
use graph_scattering::gallery::{g2, g3};
use graph_scattering::Result;

pub fn run_example() -> Result<()> {
    for (name, g, k0) in [("G3", g3(), -PI / 2.0), ("G2", g2(), -PI / 3.0)] {
        let lattice = TruncatedLattice::new(&g, 200)?;
        let run = lattice.scatter(&WavePacketParams::new(k0, 0))?;
        println!("{name}: k0 = {k0:.4}, t = {:.1}, lattice size {}", run.t, lattice.size());
        for (j, (got, want)) in run.outgoing_probabilities.iter().zip(&run.predicted).enumerate() {
            println!("  path {j}: measured {got:.5}  |S|^2 {want:.5}  averaged {:.5}", run.broadened[j]);
        }
        println!("  left behind {:.2e}, norm drift {:.1e}", run.leakage, run.norm_deviation);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
