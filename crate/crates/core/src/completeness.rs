//! Numerical resolution of the identity on a finite vertex window: the
//! scattering states integrated over `k in (-pi, 0)` plus the unconfined and
//! confined bound states must reproduce `delta_vw`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ScatteringGraph;
use crate::quadrature::{integrate, QuadratureConfig};
use crate::smatrix::{amplitude_from, continuation, Vertex};
use crate::spectra::{bound_state_catalog, BoundStateCatalog, RootClass};
use crate::tolerance::ToleranceConfig;

pub const DEFAULT_X_CUT: usize = 6;
/// Acceptance for graphs without threshold (half-bound) structure.
pub const SMOOTH_TOLERANCE: f64 = 1e-6;
/// Acceptance when half-bound states sit at an integration endpoint.
pub const HALF_BOUND_TOLERANCE: f64 = 1e-4;

/// Gadget vertices followed by path vertices `2..=x_cut` on every path.
pub fn window(graph: &ScatteringGraph, x_cut: usize) -> Vec<Vertex> {
    let mut out: Vec<Vertex> = (0..graph.n()).map(|path| Vertex::Path { path, x: 1 }).collect();
    out.extend((0..graph.m()).map(Vertex::Internal));
    for path in 0..graph.n() {
        out.extend((2..=x_cut).map(|x| Vertex::Path { path, x }));
    }
    out
}

/// Momenta in `(-pi, 0)` where `gamma(e^{ik})` is singular, plus the
/// endpoints when `W(+-1) = 0`. Returned as `(interior, endpoints)`.
fn singular_energies(catalog: &BoundStateCatalog) -> (Vec<f64>, Vec<f64>) {
    let mut interior = Vec::new();
    let mut endpoints = Vec::new();
    for root in &catalog.census.roots {
        match root.class {
            RootClass::OnCircleConjugatePair if root.value.im < 0.0 => {
                interior.push(root.value.arg())
            }
            RootClass::AtPlusMinusOne => {
                endpoints.push(if root.value.re > 0.0 { 0.0 } else { -PI })
            }
            _ => {}
        }
    }
    interior.sort_by(f64::total_cmp);
    interior.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    endpoints.sort_by(f64::total_cmp);
    (interior, endpoints)
}

fn breakpoints(interior: &[f64]) -> Vec<f64> {
    let mut b = vec![-PI];
    b.extend(interior.iter().copied().filter(|&k| k > -PI && k < 0.0));
    b.push(0.0);
    b
}

/// `(2 pi)^-1 sum_j <a|sc_j(k)><sc_j(k)|b>` for every ordered pair drawn from
/// `rows x cols`, row-major.
fn integrand(
    graph: &ScatteringGraph,
    rows: &[Vertex],
    cols: &[Vertex],
    k: f64,
) -> Result<Vec<Complex64>> {
    let z = Complex64::from_polar(1.0, k);
    let c = continuation(graph, z).map_err(|e| match e {
        Error::GammaSingular { .. } => Error::QuadratureStalled {
            k,
            reason: "quadrature node landed on a singular energy".into(),
        },
        other => other,
    })?;
    let n = graph.n();
    let amps = |vs: &[Vertex]| -> Vec<Vec<Complex64>> {
        vs.iter()
            .map(|&v| (0..n).map(|j| amplitude_from(z, &c.s, &c.psi, j, v)).collect())
            .collect()
    };
    let ra = amps(rows);
    let ca = amps(cols);
    let mut out = Vec::with_capacity(rows.len() * cols.len());
    for a in &ra {
        for b in &ca {
            let sum: Complex64 = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
            out.push(sum / (2.0 * PI));
        }
    }
    Ok(out)
}

/// Amplitude of each unconfined bound state (normalised) at `v`.
fn unconfined_amplitudes(catalog: &BoundStateCatalog, v: Vertex) -> Vec<Complex64> {
    catalog
        .unconfined
        .iter()
        .map(|b| {
            let a = match v {
                Vertex::Path { path, x } => b.alpha[path] * b.x0.powi(x as i32 - 1),
                Vertex::Internal(w) => b.beta[w],
            };
            a * b.norm_const
        })
        .collect()
}

fn confined_amplitudes(catalog: &BoundStateCatalog, v: Vertex) -> Vec<Complex64> {
    catalog
        .confined
        .iter()
        .map(|c| match v {
            Vertex::Path { .. } => Complex64::new(0.0, 0.0),
            Vertex::Internal(w) => c.beta[w],
        })
        .collect()
}

/// `(sum_b <v|phi_b><phi_b|w>, sum_c <v|psi_c><psi_c|w>)`.
pub fn bound_projection(
    catalog: &BoundStateCatalog,
    v: Vertex,
    w: Vertex,
) -> (Complex64, Complex64) {
    let dot = |a: Vec<Complex64>, b: Vec<Complex64>| -> Complex64 {
        a.iter().zip(&b).map(|(x, y)| x * y.conj()).sum()
    };
    (
        dot(unconfined_amplitudes(catalog, v), unconfined_amplitudes(catalog, w)),
        dot(confined_amplitudes(catalog, v), confined_amplitudes(catalog, w)),
    )
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OverlapIntegral {
    pub value: Complex64,
    pub error_estimate: f64,
    pub panels: usize,
}

/// `int_{-pi}^{0} dk/(2 pi) sum_j <v|sc_j(k)><sc_j(k)|w>`.
pub fn scattering_overlap_integral(
    graph: &ScatteringGraph,
    v: Vertex,
    w: Vertex,
    quad: &QuadratureConfig,
    tol: &ToleranceConfig,
) -> Result<OverlapIntegral> {
    v.check(graph)?;
    w.check(graph)?;
    let catalog = bound_state_catalog(graph, tol)?;
    let (interior, _) = singular_energies(&catalog);
    let r = integrate(|k| integrand(graph, &[v], &[w], k), &breakpoints(&interior), quad)?;
    Ok(OverlapIntegral { value: r.value[0], error_estimate: r.error_estimate, panels: r.panels })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairDeviation {
    pub v: Vertex,
    pub w: Vertex,
    pub deviation: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompletenessReport {
    pub x_cut: usize,
    pub window: Vec<Vertex>,
    /// Largest `|LHS - delta_vw|` over ordered window pairs.
    pub max_deviation: f64,
    pub worst_pairs: Vec<PairDeviation>,
    /// Largest `|LHS_vw - conj(LHS_wv)|`.
    pub hermiticity_defect: f64,
    pub quad_panels: usize,
    pub quad_error_estimate: f64,
    pub quad_target: f64,
    /// Momenta where `gamma(e^{ik})` is singular (interior split points and
    /// threshold endpoints).
    pub excluded_energies: Vec<f64>,
    pub half_bound_endpoints: bool,
    /// 1e-6 normally; 1e-4 when half-bound states sit at the endpoints,
    /// where the integrand carries threshold structure.
    pub acceptance_tolerance: f64,
    pub pass: bool,
}

/// Resolution-of-identity defect on the window of gadget vertices and path
/// vertices up to `x_cut`.
pub fn completeness_defect(
    graph: &ScatteringGraph,
    x_cut: usize,
    quad: &QuadratureConfig,
    tol: &ToleranceConfig,
) -> Result<CompletenessReport> {
    if x_cut < 2 {
        return Err(Error::Domain(format!("x_cut must be at least 2, got {x_cut}")));
    }
    let catalog = bound_state_catalog(graph, tol)?;
    completeness_with_catalog(graph, &catalog, x_cut, quad)
}

pub(crate) fn completeness_with_catalog(
    graph: &ScatteringGraph,
    catalog: &BoundStateCatalog,
    x_cut: usize,
    quad: &QuadratureConfig,
) -> Result<CompletenessReport> {
    let win = window(graph, x_cut);
    let size = win.len();
    let (interior, endpoints) = singular_energies(catalog);
    let r = integrate(|k| integrand(graph, &win, &win, k), &breakpoints(&interior), quad)?;
    let mut lhs = r.value;
    for (a, &v) in win.iter().enumerate() {
        for (b, &w) in win.iter().enumerate() {
            let (unconf, conf) = bound_projection(catalog, v, w);
            lhs[a * size + b] += unconf + conf;
        }
    }
    let mut pairs = Vec::with_capacity(size * size);
    let mut hermiticity_defect: f64 = 0.0;
    for a in 0..size {
        for b in 0..size {
            let delta = if a == b { 1.0 } else { 0.0 };
            let deviation = (lhs[a * size + b] - delta).norm();
            pairs.push(PairDeviation { v: win[a], w: win[b], deviation });
            hermiticity_defect =
                hermiticity_defect.max((lhs[a * size + b] - lhs[b * size + a].conj()).norm());
        }
    }
    pairs.sort_by(|p, q| q.deviation.total_cmp(&p.deviation));
    let max_deviation = pairs.first().map(|p| p.deviation).unwrap_or(0.0);
    pairs.truncate(5);
    let half_bound_endpoints = catalog.n_h > 0;
    let acceptance_tolerance =
        if half_bound_endpoints { HALF_BOUND_TOLERANCE } else { SMOOTH_TOLERANCE };
    let mut excluded_energies = interior;
    excluded_energies.extend(endpoints);
    excluded_energies.sort_by(f64::total_cmp);
    Ok(CompletenessReport {
        x_cut,
        window: win,
        max_deviation,
        worst_pairs: pairs,
        hermiticity_defect,
        quad_panels: r.panels,
        quad_error_estimate: r.error_estimate,
        quad_target: quad.target,
        excluded_energies,
        half_bound_endpoints,
        acceptance_tolerance,
        pass: max_deviation <= acceptance_tolerance,
    })
}
