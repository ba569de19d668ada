//! Wave-packet scattering on a truncated lattice, evolved exactly through a
//! dense eigendecomposition, as an independent check of `|S_{j'j}|^2`.
//!
//! Layout of the truncated lattice: gadget vertices keep their indices
//! `0..m+n` (attachment `j` is path vertex `(1, j)`), then path `j` holds
//! `x = 2..=L` at `m + n + j (L - 1) + x - 2`. Total size `m + nL`.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ScatteringGraph;
use crate::linalg::{hermitian_eigen, CMatrix, CVector};
use crate::smatrix::{s_matrix_on_circle, Vertex};

pub const DEFAULT_L: usize = 400;
pub const DEFAULT_SIGMA_X: f64 = 10.0;
pub const DEFAULT_BUFFER: usize = 20;
/// Fraction of `L` where the outgoing packet centre sits at measurement.
pub const MEASURE_FRACTION: f64 = 0.7;
pub const LEAKAGE_LIMIT: f64 = 0.05;
/// Packet extent in units of its (time-dependent) width.
const SUPPORT_WIDTHS: f64 = 5.0;

/// Hamiltonian of the gadget plus `n` paths cut off after `x = l`.
pub fn truncate(graph: &ScatteringGraph, l: usize) -> Result<CMatrix> {
    if l == 0 {
        return Err(Error::TruncationTooSmall("paths need at least one vertex".into()));
    }
    let (n, d) = (graph.n(), graph.dim());
    let size = graph.m() + n * l;
    let mut h = CMatrix::zeros(size, size);
    h.view_mut((0, 0), (d, d)).copy_from(graph.hhat());
    let one = Complex64::new(1.0, 0.0);
    for j in 0..n {
        let mut prev = j;
        for x in 2..=l {
            let idx = d + j * (l - 1) + x - 2;
            h[(prev, idx)] = one;
            h[(idx, prev)] = one;
            prev = idx;
        }
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePacketParams {
    /// Carrier momentum in `(-pi, 0)`.
    pub k0: f64,
    /// Position-space width.
    pub sigma_x: f64,
    pub path: usize,
    /// Initial centre; defaults to `buffer + 6 sigma_x`, the closest start
    /// that keeps the packet clear of the buffer.
    pub x0: Option<f64>,
    /// Evolution time; defaults to the time at which the outgoing centre
    /// reaches `0.7 L`.
    pub t: Option<f64>,
    pub buffer: usize,
}

impl WavePacketParams {
    pub fn new(k0: f64, path: usize) -> Self {
        Self { k0, sigma_x: DEFAULT_SIGMA_X, path, x0: None, t: None, buffer: DEFAULT_BUFFER }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WavePacketRun {
    pub k0: f64,
    pub sigma_x: f64,
    /// Momentum-space width `1 / (2 sigma_x)`.
    pub sigma_k: f64,
    pub j_in: usize,
    pub l: usize,
    pub t: f64,
    pub x0: f64,
    pub buffer: usize,
    /// Probability on path `j'` beyond the buffer.
    pub outgoing_probabilities: Vec<f64>,
    /// Probability left on the gadget and inside the buffer.
    pub leakage: f64,
    /// `|S_{j' j_in}(e^{i k0})|^2`.
    pub predicted: Vec<f64>,
    pub max_prediction_error: f64,
    /// `|S_{j' j_in}|^2` averaged over the packet's momentum distribution.
    pub broadened: Vec<f64>,
    /// Largest `|outgoing - broadened|`; isolates the evolution from
    /// finite-width effects.
    pub broadened_error: f64,
    /// `| ||psi(t)|| - 1 |`.
    pub norm_deviation: f64,
    /// `|<H>_t - <H>_0|`.
    pub energy_deviation: f64,
}

/// A truncated lattice with its eigendecomposition, reusable across runs.
pub struct TruncatedLattice {
    graph: ScatteringGraph,
    l: usize,
    h: CMatrix,
    energies: Vec<f64>,
    modes: CMatrix,
}

impl TruncatedLattice {
    pub fn new(graph: &ScatteringGraph, l: usize) -> Result<Self> {
        let h = truncate(graph, l)?;
        let (energies, modes) = hermitian_eigen(&h);
        Ok(Self { graph: graph.clone(), l, h, energies, modes })
    }

    pub fn size(&self) -> usize {
        self.h.nrows()
    }

    pub fn hamiltonian(&self) -> &CMatrix {
        &self.h
    }

    pub fn index(&self, v: Vertex) -> Result<usize> {
        v.check(&self.graph)?;
        match v {
            Vertex::Internal(w) => Ok(self.graph.n() + w),
            Vertex::Path { path, x: 1 } => Ok(path),
            Vertex::Path { path, x } if x <= self.l => {
                Ok(self.graph.dim() + path * (self.l - 1) + x - 2)
            }
            Vertex::Path { x, .. } => {
                Err(Error::Domain(format!("x = {x} lies beyond the truncation L = {}", self.l)))
            }
        }
    }

    /// Normalised `e^{-i k0 x} exp(-(x - x0)^2 / (4 sigma_x^2))` on one path;
    /// the `e^{-ikx}` phase makes the packet move toward the gadget.
    pub fn initial_packet(&self, path: usize, k0: f64, x0: f64, sigma_x: f64) -> Result<CVector> {
        let mut psi = CVector::zeros(self.size());
        for x in 1..=self.l {
            let envelope = (-(x as f64 - x0).powi(2) / (4.0 * sigma_x * sigma_x)).exp();
            psi[self.index(Vertex::Path { path, x })?] =
                Complex64::from_polar(envelope, -k0 * x as f64);
        }
        let norm = psi.norm();
        Ok(psi / Complex64::new(norm, 0.0))
    }

    /// `exp(-iHt) psi`.
    pub fn evolve(&self, psi: &CVector, t: f64) -> CVector {
        let mut coeffs = self.modes.ad_mul(psi);
        for (c, &e) in coeffs.iter_mut().zip(&self.energies) {
            *c *= Complex64::from_polar(1.0, -e * t);
        }
        &self.modes * coeffs
    }

    pub fn energy(&self, psi: &CVector) -> f64 {
        psi.dotc(&(&self.h * psi)).re
    }

    /// Per-vertex `|psi|^2` for `x = 1..=L` on each path, then the internal
    /// vertices.
    pub fn density_by_path(&self, psi: &CVector) -> (Vec<Vec<f64>>, Vec<f64>) {
        let paths = (0..self.graph.n())
            .map(|path| {
                (1..=self.l)
                    .map(|x| psi[self.index(Vertex::Path { path, x }).expect("in range")].norm_sqr())
                    .collect()
            })
            .collect();
        let internal = (0..self.graph.m()).map(|w| psi[self.graph.n() + w].norm_sqr()).collect();
        (paths, internal)
    }

    fn resolve(&self, p: &WavePacketParams) -> Result<(f64, f64)> {
        let n = self.graph.n();
        if p.path >= n {
            return Err(Error::Domain(format!("path {} out of range (n = {n})", p.path)));
        }
        if !(p.sigma_x.is_finite() && p.sigma_x > 0.0) {
            return Err(Error::Domain(format!("sigma_x must be positive, got {}", p.sigma_x)));
        }
        let sigma_k = 0.5 / p.sigma_x;
        if !(p.k0 - 6.0 * sigma_k > -std::f64::consts::PI && p.k0 + 6.0 * sigma_k < 0.0) {
            return Err(Error::Domain(format!(
                "momentum support k0 = {} +- {:.3} leaves (-pi, 0); widen sigma_x",
                p.k0,
                6.0 * sigma_k
            )));
        }
        let l = self.l as f64;
        let x0 = p.x0.unwrap_or(p.buffer as f64 + 6.0 * p.sigma_x);
        let v = 2.0 * p.k0.sin().abs();
        let t = p.t.unwrap_or((x0 - 1.0 + MEASURE_FRACTION * l - 1.0) / v);
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::Domain(format!("evolution time must be non-negative, got {t}")));
        }
        // dispersive broadening of a Gaussian under E = 2 cos k
        let curvature = 2.0 * p.k0.cos().abs();
        let width_t = (p.sigma_x.powi(2) + (curvature * t / (2.0 * p.sigma_x)).powi(2)).sqrt();
        let start_lo = x0 - SUPPORT_WIDTHS * p.sigma_x;
        let start_hi = x0 + SUPPORT_WIDTHS * p.sigma_x;
        let travelled = v * t - (x0 - 1.0);
        if start_lo < (p.buffer + 1) as f64 || start_hi > l {
            return Err(Error::TruncationTooSmall(format!(
                "initial packet [{start_lo:.1}, {start_hi:.1}] must sit between the buffer {} and L = {}",
                p.buffer, self.l
            )));
        }
        // the far edge must not reach the open end at x = L
        let far_edge = travelled.max(x0).max(x0 - v * t) + SUPPORT_WIDTHS * width_t;
        if far_edge >= l {
            return Err(Error::TruncationTooSmall(format!(
                "packet edge reaches x = {far_edge:.1} >= L = {}; increase L",
                self.l
            )));
        }
        Ok((x0, t))
    }

    pub fn scatter(&self, p: &WavePacketParams) -> Result<WavePacketRun> {
        let (x0, t) = self.resolve(p)?;
        let psi0 = self.initial_packet(p.path, p.k0, x0, p.sigma_x)?;
        let psi = self.evolve(&psi0, t);
        let (paths, internal) = self.density_by_path(&psi);
        let outgoing: Vec<f64> = paths.iter().map(|d| d[p.buffer..].iter().sum()).collect();
        let inner: f64 = paths.iter().map(|d| d[..p.buffer].iter().sum::<f64>()).sum::<f64>()
            + internal.iter().sum::<f64>();
        let s = s_matrix_on_circle(&self.graph, p.k0)?;
        let predicted: Vec<f64> = (0..self.graph.n()).map(|j| s.s[(j, p.path)].norm_sqr()).collect();
        let broadened = self.broadened_prediction(p)?;
        let max_prediction_error = outgoing
            .iter()
            .zip(&predicted)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let run = WavePacketRun {
            k0: p.k0,
            sigma_x: p.sigma_x,
            sigma_k: 0.5 / p.sigma_x,
            j_in: p.path,
            l: self.l,
            t,
            x0,
            buffer: p.buffer,
            outgoing_probabilities: outgoing.clone(),
            leakage: inner,
            predicted,
            max_prediction_error,
            broadened_error: outgoing
                .iter()
                .zip(&broadened)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max),
            broadened,
            norm_deviation: (psi.norm() - 1.0).abs(),
            energy_deviation: (self.energy(&psi) - self.energy(&psi0)).abs(),
        };
        if run.leakage > LEAKAGE_LIMIT {
            return Err(Error::PacketNotCleared { leakage: run.leakage });
        }
        Ok(run)
    }

    /// `sum_k w(k) |S_{j' j}(e^{ik})|^2` with `w` the packet's Gaussian
    /// momentum weight (standard deviation `1 / (2 sigma_x)`), on a grid of
    /// `+-6` standard deviations.
    pub fn broadened_prediction(&self, p: &WavePacketParams) -> Result<Vec<f64>> {
        const POINTS: i32 = 60;
        let sigma_k = 0.5 / p.sigma_x;
        let mut acc = vec![0.0; self.graph.n()];
        let mut total = 0.0;
        for i in -POINTS..=POINTS {
            let u = 6.0 * i as f64 / POINTS as f64;
            let w = (-0.5 * u * u).exp();
            let s = s_matrix_on_circle(&self.graph, p.k0 + u * sigma_k)?;
            for (j, a) in acc.iter_mut().enumerate() {
                *a += w * s.s[(j, p.path)].norm_sqr();
            }
            total += w;
        }
        Ok(acc.into_iter().map(|a| a / total).collect())
    }

    /// Runs independent packets in parallel; results keep the input order.
    pub fn scatter_all(&self, params: &[WavePacketParams]) -> Vec<Result<WavePacketRun>> {
        params.par_iter().map(|p| self.scatter(p)).collect()
    }

    /// `|psi(t)|^2` at each requested time, one row per time:
    /// `t, path 0 x=1..L, ..., path n-1 x=1..L, internal vertices`.
    pub fn write_density_csv(
        &self,
        p: &WavePacketParams,
        times: &[f64],
        mut out: impl Write,
    ) -> Result<()> {
        let (x0, _) = self.resolve(p)?;
        let psi0 = self.initial_packet(p.path, p.k0, x0, p.sigma_x)?;
        let mut header = vec!["t".to_string()];
        for j in 0..self.graph.n() {
            header.extend((1..=self.l).map(|x| format!("p{j}_x{x}")));
        }
        header.extend((0..self.graph.m()).map(|w| format!("w{w}")));
        writeln!(out, "{}", header.join(","))?;
        for &t in times {
            let (paths, internal) = self.density_by_path(&self.evolve(&psi0, t));
            let mut row = vec![format!("{t}")];
            row.extend(paths.iter().flatten().chain(&internal).map(|v| format!("{v:e}")));
            writeln!(out, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// One packet on a fresh lattice of length `l`.
pub fn scatter_packet(graph: &ScatteringGraph, l: usize, params: &WavePacketParams) -> Result<WavePacketRun> {
    TruncatedLattice::new(graph, l)?.scatter(params)
}
