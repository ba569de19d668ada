//! The polynomial matrix `gamma(z)`, the scattering matrix `S(z)` (on the
//! unit circle and continued off it), internal amplitudes `Psi(z)` and the
//! scattering states built from them.
//!
//! The canonical evaluation uses `-gamma(z)^-1 gamma(1/z)`, whose upper-left
//! `n x n` block is `S(z)`, lower-left block is `Psi(z)/z` and lower-right
//! block is `-z^-2`. The resolvent form `-Q(z)^-1 Q(1/z)` is kept as an
//! independent cross-check.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ScatteringGraph;
use crate::linalg::{determinant, hermitian_eigen, inverse_with_condition, max_abs_diff, CMatrix};
use crate::tolerance::ToleranceConfig;

/// Condition number of `gamma(z)` above which it is treated as singular.
pub const GAMMA_CONDITION_LIMIT: f64 = 1e12;

/// `gamma(z) = z^2 (P_n - 1) + z H - 1`.
pub fn gamma(graph: &ScatteringGraph, z: Complex64) -> CMatrix {
    let dim = graph.dim();
    let mut g = graph.hhat() * z;
    for i in 0..dim {
        g[(i, i)] -= 1.0;
        if i >= graph.n() {
            g[(i, i)] -= z * z;
        }
    }
    g
}

/// `Q(z) = 1 - z (A + B^dagger (1/z + z - D)^-1 B)`.
pub fn q_matrix(graph: &ScatteringGraph, z: Complex64, tol: &ToleranceConfig) -> Result<CMatrix> {
    let resolvent = resolvent(graph, z, tol)?;
    Ok(q_from_resolvent(graph, z, &resolvent))
}

fn resolvent(graph: &ScatteringGraph, z: Complex64, tol: &ToleranceConfig) -> Result<CMatrix> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroArgument);
    }
    let m = graph.m();
    if m == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let w = z.inv() + z;
    let d = graph.d_block().into_owned();
    let (eigs, _) = hermitian_eigen(&d);
    let margin = eigs.iter().map(|&l| (w - l).norm()).fold(f64::INFINITY, f64::min);
    if margin <= tol.eps_rank * graph.scale() {
        return Err(Error::ResolventSingular { z });
    }
    let mut shifted = -d;
    for i in 0..m {
        shifted[(i, i)] += w;
    }
    shifted
        .lu()
        .try_inverse()
        .ok_or(Error::ResolventSingular { z })
}

fn q_from_resolvent(graph: &ScatteringGraph, z: Complex64, resolvent: &CMatrix) -> CMatrix {
    let n = graph.n();
    let b = graph.b_block();
    let mut inner = graph.a_block().into_owned();
    if graph.m() > 0 {
        inner += b.adjoint() * resolvent * b;
    }
    CMatrix::identity(n, n) - inner * z
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SMatrixMethod {
    ContinuationForm,
    QForm,
}

/// `S(z)` together with the internal amplitudes at one spectral parameter.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SMatrixSample {
    pub z: Complex64,
    /// Momentum when the sample sits on the unit circle (`z = e^{ik}`).
    pub k: Option<f64>,
    pub s: CMatrix,
    /// Internal amplitudes, one column per incoming path (m x n).
    pub psi: CMatrix,
    pub det_s: Complex64,
    pub method: SMatrixMethod,
    /// Deviation of the lower-right block of `-gamma(z)^-1 gamma(1/z)` from
    /// `-z^-2`, relative to `max(1, |z|^-2)`. Zero for resolvent-form samples.
    pub continuation_residual: f64,
    /// Largest entrywise difference to the resolvent form, when that form
    /// was well conditioned at `z`.
    pub qform_deviation: Option<f64>,
}

impl SMatrixSample {
    /// `max |S^dagger S - 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.s.nrows();
        max_abs_diff(&(self.s.adjoint() * &self.s), &CMatrix::identity(n, n))
    }
}

pub(crate) struct Continued {
    pub s: CMatrix,
    pub psi: CMatrix,
    pub residual: f64,
}

/// Evaluates the continuation form without the resolvent cross-check.
pub(crate) fn continuation(graph: &ScatteringGraph, z: Complex64) -> Result<Continued> {
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroArgument);
    }
    let n = graph.n();
    let m = graph.m();
    let g = gamma(graph, z);
    let (inv, condition) = inverse_with_condition(&g)
        .ok_or(Error::GammaSingular { z, condition: f64::INFINITY })?;
    if condition > GAMMA_CONDITION_LIMIT {
        return Err(Error::GammaSingular { z, condition });
    }
    let full = -(inv * gamma(graph, z.inv()));
    let s = full.view((0, 0), (n, n)).into_owned();
    let psi = full.view((n, 0), (m, n)) * z;
    let target = -(z * z).inv();
    let mut residual: f64 = 0.0;
    for i in 0..m {
        for j in 0..m {
            let expected = if i == j { target } else { Complex64::new(0.0, 0.0) };
            residual = residual.max((full[(n + i, n + j)] - expected).norm());
        }
    }
    residual /= target.norm().max(1.0);
    Ok(Continued { s, psi, residual })
}

/// `S(z)` as the upper-left block of `-gamma(z)^-1 gamma(1/z)`; cross-checked
/// against `-Q(z)^-1 Q(1/z)` where the resolvent is well conditioned.
pub fn s_matrix(graph: &ScatteringGraph, z: Complex64) -> Result<SMatrixSample> {
    let c = continuation(graph, z)?;
    let cross_check = ToleranceConfig { eps_rank: 1e-6, ..ToleranceConfig::default() };
    let qform_deviation = s_matrix_qform(graph, z, &cross_check)
        .ok()
        .map(|q| max_abs_diff(&q.s, &c.s));
    let det_s = determinant(&c.s);
    Ok(SMatrixSample {
        z,
        k: None,
        s: c.s,
        psi: c.psi,
        det_s,
        method: SMatrixMethod::ContinuationForm,
        continuation_residual: c.residual,
        qform_deviation,
    })
}

/// `S(e^{ik})` via the continuation form.
pub fn s_matrix_on_circle(graph: &ScatteringGraph, k: f64) -> Result<SMatrixSample> {
    let mut sample = s_matrix(graph, Complex64::from_polar(1.0, k))?;
    sample.k = Some(k);
    Ok(sample)
}

/// `S(z) = -Q(z)^-1 Q(1/z)`, with `Psi(z) = (1/z + z - D)^-1 (B/z + z B S)`.
pub fn s_matrix_qform(
    graph: &ScatteringGraph,
    z: Complex64,
    tol: &ToleranceConfig,
) -> Result<SMatrixSample> {
    let resolvent = resolvent(graph, z, tol)?;
    let q = q_from_resolvent(graph, z, &resolvent);
    // (1/z + z - D) is symmetric under z -> 1/z, so the resolvent is shared
    let q_inv_arg = q_from_resolvent(graph, z.inv(), &resolvent);
    let (q_inv, condition) = inverse_with_condition(&q)
        .ok_or(Error::GammaSingular { z, condition: f64::INFINITY })?;
    if condition > GAMMA_CONDITION_LIMIT {
        return Err(Error::GammaSingular { z, condition });
    }
    let s = -(q_inv * q_inv_arg);
    let psi = if graph.m() > 0 {
        let b = graph.b_block();
        &resolvent * (b * z.inv() + (b * &s) * z)
    } else {
        CMatrix::zeros(0, graph.n())
    };
    let det_s = determinant(&s);
    Ok(SMatrixSample {
        z,
        k: None,
        s,
        psi,
        det_s,
        method: SMatrixMethod::QForm,
        continuation_residual: 0.0,
        qform_deviation: None,
    })
}

/// A vertex of the infinite graph. Path coordinates use `x >= 1`, where
/// `x = 1` is the attachment vertex of that path (gadget index `path`).
/// Internal vertices are indexed `0..m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Vertex {
    Path { path: usize, x: usize },
    Internal(usize),
}

impl Vertex {
    /// Index into the gadget matrix, when the vertex belongs to the gadget.
    pub fn gadget_index(&self, graph: &ScatteringGraph) -> Option<usize> {
        match *self {
            Vertex::Path { path, x: 1 } => Some(path),
            Vertex::Path { .. } => None,
            Vertex::Internal(w) => Some(graph.n() + w),
        }
    }

    pub(crate) fn check(&self, graph: &ScatteringGraph) -> Result<()> {
        match *self {
            Vertex::Path { path, x } if path < graph.n() && x >= 1 => Ok(()),
            Vertex::Internal(w) if w < graph.m() => Ok(()),
            other => Err(Error::Domain(format!("vertex {other:?} does not exist"))),
        }
    }
}

impl std::fmt::Display for Vertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Vertex::Path { path, x } => write!(f, "({x},{path})"),
            Vertex::Internal(w) => write!(f, "internal {w}"),
        }
    }
}

fn check_momentum(k: f64) -> Result<()> {
    if k > -PI && k < 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("momentum {k} outside (-pi, 0)")))
    }
}

/// Amplitude of a vertex in an already evaluated scattering solution.
pub(crate) fn amplitude_from(
    z: Complex64,
    s: &CMatrix,
    psi: &CMatrix,
    incoming: usize,
    vertex: Vertex,
) -> Complex64 {
    match vertex {
        Vertex::Path { path, x } => {
            let zx = z.powi(x as i32);
            let incident = if path == incoming { zx.inv() } else { Complex64::new(0.0, 0.0) };
            incident + zx * s[(path, incoming)]
        }
        Vertex::Internal(w) => psi[(w, incoming)],
    }
}

/// `<vertex | sc_j(k)>` for the incoming scattering state on path `incoming`.
pub fn scattering_amplitude(
    graph: &ScatteringGraph,
    k: f64,
    incoming: usize,
    vertex: Vertex,
) -> Result<Complex64> {
    check_momentum(k)?;
    if incoming >= graph.n() {
        return Err(Error::Domain(format!("path {incoming} does not exist")));
    }
    vertex.check(graph)?;
    let z = Complex64::from_polar(1.0, k);
    let c = continuation(graph, z)?;
    Ok(amplitude_from(z, &c.s, &c.psi, incoming, vertex))
}

/// Builds the scattering state on the gadget plus path vertices `x <= x_cut`
/// and returns the largest eigenvalue-equation residual over rows whose
/// neighbourhood lies inside the truncation.
pub fn verify_scattering_state(
    graph: &ScatteringGraph,
    k: f64,
    incoming: usize,
    x_cut: usize,
) -> Result<f64> {
    check_momentum(k)?;
    if x_cut < 3 {
        return Err(Error::Domain(format!("x_cut must be at least 3, got {x_cut}")));
    }
    if incoming >= graph.n() {
        return Err(Error::Domain(format!("path {incoming} does not exist")));
    }
    let n = graph.n();
    let dim = graph.dim();
    let z = Complex64::from_polar(1.0, k);
    let c = continuation(graph, z)?;
    let energy = 2.0 * k.cos();
    let gadget: Vec<Complex64> = (0..dim)
        .map(|i| {
            let v = if i < n { Vertex::Path { path: i, x: 1 } } else { Vertex::Internal(i - n) };
            amplitude_from(z, &c.s, &c.psi, incoming, v)
        })
        .collect();
    let on_path = |path: usize, x: usize| {
        amplitude_from(z, &c.s, &c.psi, incoming, Vertex::Path { path, x })
    };
    let mut worst: f64 = 0.0;
    for i in 0..dim {
        let mut row: Complex64 = (0..dim).map(|l| graph.hhat()[(i, l)] * gadget[l]).sum();
        if i < n {
            row += on_path(i, 2);
        }
        worst = worst.max((row - gadget[i] * energy).norm());
    }
    for path in 0..n {
        for x in 2..x_cut {
            let row = on_path(path, x - 1) + on_path(path, x + 1) - on_path(path, x) * energy;
            worst = worst.max(row.norm());
        }
    }
    Ok(worst)
}

/// Uniform momenta `k_t = -pi + 2 pi t / size`, `t = 0..size`.
pub fn circle_grid(size: usize) -> Vec<f64> {
    (0..size).map(|t| -PI + 2.0 * PI * t as f64 / size as f64).collect()
}

/// Evaluates `S(e^{ik})` at each momentum, moving any point where `gamma`
/// is singular forward by half a grid step.
pub fn sample_circle(graph: &ScatteringGraph, momenta: &[f64]) -> Result<Vec<SMatrixSample>> {
    let step = if momenta.len() > 1 { momenta[1] - momenta[0] } else { PI };
    momenta
        .iter()
        .map(|&k| match s_matrix_on_circle(graph, k) {
            Err(Error::GammaSingular { .. }) => s_matrix_on_circle(graph, k + 0.5 * step),
            other => other,
        })
        .collect()
}

/// Writes `k, Re S_ij, Im S_ij ..., arg det S` rows (row-major entries).
pub fn write_csv(samples: &[SMatrixSample], mut out: impl Write) -> std::io::Result<()> {
    let Some(first) = samples.first() else {
        return writeln!(out, "k,arg_det_s");
    };
    let n = first.s.nrows();
    let mut header = vec!["k".to_string()];
    for i in 0..n {
        for j in 0..n {
            header.push(format!("re_s{i}{j}"));
            header.push(format!("im_s{i}{j}"));
        }
    }
    header.push("arg_det_s".into());
    writeln!(out, "{}", header.join(","))?;
    for sample in samples {
        let k = sample.k.unwrap_or_else(|| sample.z.arg());
        let mut row = vec![format!("{k}")];
        for i in 0..n {
            for j in 0..n {
                row.push(format!("{}", sample.s[(i, j)].re));
                row.push(format!("{}", sample.s[(i, j)].im));
            }
        }
        row.push(format!("{}", sample.det_s.arg()));
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
