//! Combined analysis of one graph, as emitted by the `analyze` subcommand.

use serde::{Deserialize, Serialize};

use crate::completeness::{completeness_with_catalog, CompletenessReport};
use crate::error::Result;
use crate::graph::ScatteringGraph;
use crate::levinson::{levinson_report, winding_by_phase, LevinsonReport, DEFAULT_INITIAL_GRID, DEFAULT_MAX_REFINE};
use crate::quadrature::QuadratureConfig;
use crate::spectra::{
    bound_state_catalog, root_location_report, BoundStateCatalog, CountIdentityReport,
    RootLocationReport,
};
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSummary {
    pub n: usize,
    pub m: usize,
    pub scale: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub version: String,
    pub graph: GraphSummary,
    pub tolerances: ToleranceConfig,
    pub catalog: BoundStateCatalog,
    pub count_identities: CountIdentityReport,
    pub levinson: LevinsonReport,
    pub root_location: RootLocationReport,
    pub completeness: Option<CompletenessReport>,
    pub pass: bool,
}

/// Window and quadrature settings for the optional completeness stage.
#[derive(Debug, Clone, Copy)]
pub struct CompletenessOptions {
    pub x_cut: usize,
    pub quad: QuadratureConfig,
}

pub fn analyze(
    graph: &ScatteringGraph,
    tol: &ToleranceConfig,
    completeness: Option<CompletenessOptions>,
) -> Result<AnalysisReport> {
    tol.validate()?;
    let catalog = bound_state_catalog(graph, tol)?;
    let count_identities = CountIdentityReport::from_catalog(&catalog);
    let phase = winding_by_phase(graph, DEFAULT_INITIAL_GRID, DEFAULT_MAX_REFINE)?;
    let levinson = levinson_report(graph, &catalog, &phase);
    let root_location = root_location_report(graph, &catalog.census, tol)?;
    let completeness = match completeness {
        Some(opts) => Some(completeness_with_catalog(graph, &catalog, opts.x_cut, &opts.quad)?),
        None => None,
    };
    let pass = count_identities.pass
        && levinson.pass
        && completeness.as_ref().is_none_or(|c| c.pass);
    Ok(AnalysisReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        graph: GraphSummary { n: graph.n(), m: graph.m(), scale: graph.scale() },
        tolerances: *tol,
        catalog,
        count_identities,
        levinson,
        root_location,
        completeness,
        pass,
    })
}
