//! Winding number of `det S` around the unit circle, computed once by
//! tracking the phase of `det S(e^{ik})` and once from the root census of
//! `W`, compared against the bound-state count.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ScatteringGraph;
use crate::linalg::determinant;
use crate::smatrix::continuation;
use crate::spectra::{bound_state_catalog, root_census, w_polynomial, BoundStateCatalog, RootCensus};
use crate::tolerance::ToleranceConfig;

pub const DEFAULT_INITIAL_GRID: usize = 256;
pub const DEFAULT_MAX_REFINE: usize = 30;

/// Largest phase change accepted between neighbouring samples.
const MAX_PHASE_STEP: f64 = PI / 2.0;
/// Largest distance of the accumulated turns from an integer.
const INTEGER_SLACK: f64 = 0.01;

fn det_s_at(graph: &ScatteringGraph, k: f64) -> Result<Complex64> {
    let c = continuation(graph, Complex64::from_polar(1.0, k))?;
    Ok(determinant(&c.s))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PhaseWinding {
    pub winding: i64,
    /// Accumulated phase divided by `2 pi`, before rounding.
    pub turns: f64,
    pub samples_used: usize,
    pub refinement_depth: usize,
    /// `(k, unwrapped arg det S)` along the traversal; written by
    /// `write_csv`, left out of JSON.
    #[serde(skip)]
    pub trace: Vec<(f64, f64)>,
}

impl PhaseWinding {
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "k,unwrapped_phase")?;
        for (k, phase) in &self.trace {
            writeln!(out, "{k},{phase}")?;
        }
        Ok(())
    }
}

/// Finite-difference half-width for the phase slope.
const SLOPE_STEP: f64 = 1e-6;
/// Largest disagreement between an observed phase step and the trapezoid
/// estimate from the end-point slopes. A root of `W` just off the circle
/// turns the phase by nearly `2 pi` inside one grid cell, which the step
/// test alone reads as no change; the slopes at the cell ends still see the
/// flanks of that turn.
const SLOPE_MISMATCH: f64 = 1e-3;

#[derive(Clone, Copy)]
struct Sample {
    k: f64,
    value: Complex64,
    /// `d/dk arg det S`, absent when a nearby evaluation was singular.
    slope: Option<f64>,
}

struct Tracker<'a> {
    graph: &'a ScatteringGraph,
    max_refine: usize,
    samples: usize,
    depth: usize,
    phase: f64,
    trace: Vec<(f64, f64)>,
}

impl Tracker<'_> {
    /// Accumulates the phase change from `a` to `b`, bisecting while the
    /// step is too large or disagrees with the slopes.
    fn advance(&mut self, a: Sample, b: Sample, depth: usize) -> Result<()> {
        let step = (b.value / a.value).arg();
        let too_large = step.abs() >= MAX_PHASE_STEP;
        let inconsistent = match (a.slope, b.slope) {
            (Some(sa), Some(sb)) => (step - 0.5 * (b.k - a.k) * (sa + sb)).abs() > SLOPE_MISMATCH,
            _ => false,
        };
        if !too_large && (!inconsistent || depth >= self.max_refine) {
            self.phase += step;
            self.trace.push((b.k, self.phase));
            return Ok(());
        }
        if depth >= self.max_refine {
            return Err(Error::RefinementExhausted { k: 0.5 * (a.k + b.k), step: step.abs() });
        }
        self.depth = self.depth.max(depth + 1);
        let mid = self.sample(0.5 * (a.k + b.k), 0.5 * (b.k - a.k))?;
        self.advance(a, mid, depth + 1)?;
        self.advance(mid, b, depth + 1)
    }

    /// `det S(e^{ik})` and its phase slope, moved forward by half a step if
    /// `gamma` is singular. The returned `k` is the nominal one.
    fn sample(&mut self, k: f64, step: f64) -> Result<Sample> {
        self.samples += 1;
        let (at, value) = match det_s_at(self.graph, k) {
            Err(Error::GammaSingular { .. }) => {
                self.samples += 1;
                (k + 0.5 * step, det_s_at(self.graph, k + 0.5 * step)?)
            }
            other => (k, other?),
        };
        self.samples += 2;
        let slope = match (det_s_at(self.graph, at + SLOPE_STEP), det_s_at(self.graph, at - SLOPE_STEP)) {
            (Ok(hi), Ok(lo)) => Some((hi / lo).arg() / (2.0 * SLOPE_STEP)),
            _ => None,
        };
        Ok(Sample { k, value, slope })
    }
}

/// Winding of `det S` over `k in [-pi, pi]`, traversed once.
pub fn winding_by_phase(
    graph: &ScatteringGraph,
    initial_grid: usize,
    max_refine: usize,
) -> Result<PhaseWinding> {
    if initial_grid < 64 {
        return Err(Error::Domain(format!("initial grid must have at least 64 points, got {initial_grid}")));
    }
    let step = 2.0 * PI / initial_grid as f64;
    let mut tracker = Tracker { graph, max_refine, samples: 0, depth: 0, phase: 0.0, trace: Vec::new() };
    let grid: Vec<Sample> = (0..initial_grid)
        .map(|t| tracker.sample(-PI + step * t as f64, step))
        .collect::<Result<_>>()?;
    tracker.trace.push((grid[0].k, 0.0));
    for t in 0..initial_grid {
        let b = if t + 1 < initial_grid { grid[t + 1] } else { Sample { k: PI, ..grid[0] } };
        tracker.advance(grid[t], b, 0)?;
    }
    let turns = tracker.phase / (2.0 * PI);
    let winding = turns.round();
    if (turns - winding).abs() > INTEGER_SLACK {
        return Err(Error::NotInteger { turns });
    }
    Ok(PhaseWinding {
        winding: winding as i64,
        turns,
        samples_used: tracker.samples,
        refinement_depth: tracker.depth,
        trace: tracker.trace,
    })
}

/// `2m - 2 alpha1 - 2 alpha2 - alpha3`.
pub fn winding_from_census(graph: &ScatteringGraph, census: &RootCensus) -> i64 {
    2 * graph.m() as i64 - 2 * census.alpha1 as i64 - 2 * census.alpha2 as i64 - census.alpha3 as i64
}

pub fn winding_closed_form(graph: &ScatteringGraph, tol: &ToleranceConfig) -> i64 {
    winding_from_census(graph, &root_census(&w_polynomial(graph), tol))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevinsonReport {
    pub winding_phase: i64,
    pub winding_closed_form: i64,
    /// `2 (m - n_b - n_c - n_h / 2)`, always an integer.
    pub rhs: i64,
    pub pass: bool,
    pub samples_used: usize,
    pub refinement_depth: usize,
    pub turns: f64,
}

/// `2 (m - n_b - n_c - n_h / 2)` from a catalog.
pub fn bound_state_side(graph: &ScatteringGraph, catalog: &BoundStateCatalog) -> i64 {
    2 * graph.m() as i64 - 2 * catalog.n_b as i64 - 2 * catalog.n_c as i64 - catalog.n_h as i64
}

pub fn levinson_check(graph: &ScatteringGraph, tol: &ToleranceConfig) -> Result<LevinsonReport> {
    let catalog = bound_state_catalog(graph, tol)?;
    let phase = winding_by_phase(graph, DEFAULT_INITIAL_GRID, DEFAULT_MAX_REFINE)?;
    Ok(levinson_report(graph, &catalog, &phase))
}

pub(crate) fn levinson_report(
    graph: &ScatteringGraph,
    catalog: &BoundStateCatalog,
    phase: &PhaseWinding,
) -> LevinsonReport {
    let closed = winding_from_census(graph, &catalog.census);
    let rhs = bound_state_side(graph, catalog);
    LevinsonReport {
        winding_phase: phase.winding,
        winding_closed_form: closed,
        rhs,
        pass: phase.winding == closed && closed == rhs,
        samples_used: phase.samples_used,
        refinement_depth: phase.refinement_depth,
        turns: phase.turns,
    }
}
