//! Small hand-solvable gadgets used throughout the tests and examples.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::graph::ScatteringGraph;

fn build(n: usize, m: usize, edges: &[(usize, usize, Complex64)]) -> ScatteringGraph {
    let dim = n + m;
    let mut h = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for &(i, j, w) in edges {
        h[(i, j)] = w;
        h[(j, i)] = w.conj();
    }
    ScatteringGraph::new(n, m, h, 1e-12).expect("gallery gadgets are Hermitian")
}

fn real(w: f64) -> Complex64 {
    Complex64::new(w, 0.0)
}

/// One attachment vertex with no weights (`G0`).
pub fn g0() -> ScatteringGraph {
    build(1, 0, &[])
}

/// One attachment vertex with self-loop weight `c` (`G1(c)`).
pub fn g1(c: f64) -> ScatteringGraph {
    build(1, 0, &[(0, 0, real(c))])
}

/// Two attachment vertices joined by a unit edge (`G2`).
pub fn g2() -> ScatteringGraph {
    build(2, 0, &[(0, 1, real(1.0))])
}

/// Two attachment vertices joined through one internal vertex (`G3`).
pub fn g3() -> ScatteringGraph {
    build(2, 1, &[(0, 2, real(1.0)), (1, 2, real(1.0))])
}

/// One attachment vertex with two pendant internal vertices (`G4`); carries
/// a confined state at energy zero.
pub fn g4() -> ScatteringGraph {
    build(1, 2, &[(0, 1, real(1.0)), (0, 2, real(1.0))])
}

/// Parameters for random Hermitian gadgets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RandomGadgetConfig {
    pub n_min: usize,
    pub n_max: usize,
    pub m_min: usize,
    pub m_max: usize,
    /// Real and imaginary parts are drawn uniformly from `[-bound, bound]`.
    pub weight_bound: f64,
    pub imaginary: bool,
    /// Probability that a given edge (or self-loop) is present.
    pub density: f64,
}

impl Default for RandomGadgetConfig {
    fn default() -> Self {
        Self {
            n_min: 1,
            n_max: 4,
            m_min: 0,
            m_max: 6,
            weight_bound: 2.0,
            imaginary: true,
            density: 1.0,
        }
    }
}

pub fn random_gadget(rng: &mut impl Rng, cfg: &RandomGadgetConfig) -> ScatteringGraph {
    let n = rng.random_range(cfg.n_min.max(1)..=cfg.n_max.max(cfg.n_min.max(1)));
    let m = rng.random_range(cfg.m_min..=cfg.m_max.max(cfg.m_min));
    let dim = n + m;
    let b = cfg.weight_bound;
    let mut h = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for i in 0..dim {
        for j in i..dim {
            if rng.random::<f64>() >= cfg.density {
                continue;
            }
            let re = rng.random_range(-b..=b);
            let im = if cfg.imaginary && i != j { rng.random_range(-b..=b) } else { 0.0 };
            h[(i, j)] = Complex64::new(re, im);
            h[(j, i)] = Complex64::new(re, -im);
        }
    }
    ScatteringGraph::new(n, m, h, 1e-12).expect("random gadgets are Hermitian by construction")
}

/// Deterministic gadget for a given seed.
pub fn seeded_gadget(seed: u64, cfg: &RandomGadgetConfig) -> ScatteringGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_gadget(&mut rng, cfg)
}
