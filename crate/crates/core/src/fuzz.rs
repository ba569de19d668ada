//! Seeded random sweeps checking the count identities and the Levinson
//! identity on every instance.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gallery::{seeded_gadget, RandomGadgetConfig};
use crate::graph::GraphFile;
use crate::levinson::{levinson_report, winding_by_phase, LevinsonReport, DEFAULT_INITIAL_GRID, DEFAULT_MAX_REFINE};
use crate::spectra::{bound_state_catalog, CountIdentityReport};
use crate::tolerance::ToleranceConfig;

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FuzzConfig {
    pub seed: u64,
    pub count: usize,
    pub gadget: RandomGadgetConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FuzzInstance {
    /// Seed of this instance: `seed + index`.
    pub seed: u64,
    pub n: usize,
    pub m: usize,
    pub count_identities: Option<CountIdentityReport>,
    pub levinson: Option<LevinsonReport>,
    pub error: Option<String>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FuzzFailure {
    pub seed: u64,
    pub reason: String,
    pub graph: GraphFile,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FuzzReport {
    pub config: FuzzConfig,
    pub tolerances: ToleranceConfig,
    pub instances: usize,
    pub failures: usize,
    pub first_failure: Option<FuzzFailure>,
    pub results: Vec<FuzzInstance>,
    pub pass: bool,
}

fn instance_checks(
    graph: &crate::graph::ScatteringGraph,
    tol: &ToleranceConfig,
) -> Result<(CountIdentityReport, LevinsonReport)> {
    let catalog = bound_state_catalog(graph, tol)?;
    let counts = CountIdentityReport::from_catalog(&catalog);
    let phase = winding_by_phase(graph, DEFAULT_INITIAL_GRID, DEFAULT_MAX_REFINE)?;
    Ok((counts, levinson_report(graph, &catalog, &phase)))
}

pub fn run_fuzz(cfg: &FuzzConfig, tol: &ToleranceConfig) -> FuzzReport {
    let results: Vec<(FuzzInstance, GraphFile)> = (0..cfg.count)
        .into_par_iter()
        .map(|i| {
            let seed = cfg.seed.wrapping_add(i as u64);
            let graph = seeded_gadget(seed, &cfg.gadget);
            let (n, m) = (graph.n(), graph.m());
            let instance = match instance_checks(&graph, tol) {
                Ok((counts, lev)) => FuzzInstance {
                    seed,
                    n,
                    m,
                    pass: counts.pass && lev.pass,
                    count_identities: Some(counts),
                    levinson: Some(lev),
                    error: None,
                },
                Err(e) => FuzzInstance {
                    seed,
                    n,
                    m,
                    count_identities: None,
                    levinson: None,
                    error: Some(e.to_string()),
                    pass: false,
                },
            };
            (instance, graph.to_file())
        })
        .collect();
    let first_failure = results.iter().find(|(r, _)| !r.pass).map(|(r, g)| FuzzFailure {
        seed: r.seed,
        reason: r.error.clone().unwrap_or_else(|| {
            let counts = r.count_identities.as_ref().is_some_and(|c| c.pass);
            if counts { "Levinson identity failed".into() } else { "count identities failed".into() }
        }),
        graph: g.clone(),
    });
    let results: Vec<FuzzInstance> = results.into_iter().map(|(r, _)| r).collect();
    let failures = results.iter().filter(|r| !r.pass).count();
    FuzzReport {
        config: *cfg,
        tolerances: *tol,
        instances: results.len(),
        failures,
        first_failure,
        results,
        pass: failures == 0,
    }
}
