// Load a graph from JSON and run the full analysis, as the `analyze`
// subcommand does.
//
// ```bash
// cargo run --example analyze_file -- examples/graphs/g4.json
// ```

use std::path::PathBuf;

use graph_scattering::graph::load_graph_with_tolerances;
use graph_scattering::report::{analyze, CompletenessOptions};
use graph_scattering::quadrature::QuadratureConfig;
use graph_scattering::Result;

pub fn run_example() -> Result<()> {
    let path = std::env::args()
        .nth(1)
        .filter(|a| a.ends_with(".json"))
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/graphs/flux_triangle.json"));
    let (g, tol) = load_graph_with_tolerances(&path)?;
    let opts = CompletenessOptions { x_cut: 4, quad: QuadratureConfig::with_target(tol.quad_target) };
    let report = analyze(&g, &tol, Some(opts))?;
    println!("{}: n = {}, m = {}", path.display(), g.n(), g.m());
    println!("  n_b = {}, n_c = {}, n_h = {}", report.catalog.n_b, report.catalog.n_c, report.catalog.n_h);
    println!("  winding {} (rhs {})", report.levinson.winding_phase, report.levinson.rhs);
    if let Some(c) = &report.completeness {
        println!("  completeness deviation {:.2e}", c.max_deviation);
    }
    println!("  pass: {}", report.pass);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<()> {
    run_example()
}
