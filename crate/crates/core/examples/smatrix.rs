// S-matrix of a few small gadgets on the unit circle and off it.
//
// ```bash
// cargo run --example smatrix
// ```

use graph_scattering::gallery::{g1, g2, g3};
use graph_scattering::smatrix::{circle_grid, s_matrix, s_matrix_on_circle, sample_circle};
use graph_scattering::Result;
use num_complex::Complex64;

pub fn run_example() -> Result<()> {
    // two paths joined through one vertex: perfect transmission at every k
    let sample = s_matrix_on_circle(&g3(), -1.0)?;
    println!("G3 at k = -1:\n{:.6}", sample.s);

    // a pendant self-loop of weight 3 gives a k-dependent reflection phase
    let g = g1(3.0);
    for k in [-2.5, -1.5, -0.5] {
        let s = s_matrix_on_circle(&g, k)?;
        println!("G1(3) k = {k:5.2}  S = {:.6}  |S| = {:.3e} off unity", s.s[(0, 0)], (s.s[(0, 0)].norm() - 1.0).abs());
    }

    // the continuation is meromorphic: evaluate inside the disk
    let inside = s_matrix(&g, Complex64::new(0.5, 0.2))?;
    println!("G1(3) at z = 0.5+0.2i: S = {:.6}", inside.s[(0, 0)]);

    let samples = sample_circle(&g2(), &circle_grid(256))?;
    let worst = samples.iter().map(|s| s.unitarity_defect()).fold(0.0, f64::max);
    println!("G2 worst unitarity defect over 256 momenta: {worst:.2e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
