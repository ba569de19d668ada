//! Hand-derived closed forms and shared fixtures for the integration tests.
#![allow(dead_code)]

use graph_scattering::gallery::{g0, g1, g2, g3, g4, seeded_gadget, RandomGadgetConfig};
use graph_scattering::ScatteringGraph;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Closed-form S(z) for the gallery, worked out by hand from
/// `S = -Q(z)^-1 Q(1/z)`.
pub fn closed_form_s(name: &str, z: Complex64) -> DMatrix<Complex64> {
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    match name {
        "G0" => DMatrix::from_element(1, 1, -one),
        "G1(3)" => closed_form_g1(3.0, z),
        "G1(1/2)" => closed_form_g1(0.5, z),
        "G1(1)" => closed_form_g1(1.0, z),
        "G2" => DMatrix::from_row_slice(2, 2, &[zero, one / z, one / z, zero]),
        "G3" => DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]),
        "G4" => DMatrix::from_element(1, 1, one),
        other => panic!("no closed form for {other}"),
    }
}

/// `-(z - c) / (z (1 - c z))`
fn closed_form_g1(cc: f64, z: Complex64) -> DMatrix<Complex64> {
    DMatrix::from_element(1, 1, -(z - cc) / (z * (1.0 - cc * z)))
}

/// Gallery entry with its hand-derived bound-state counts and winding.
pub struct GalleryCase {
    pub name: &'static str,
    pub graph: ScatteringGraph,
    pub n_b: usize,
    pub n_c: usize,
    pub n_h: usize,
    pub winding: i64,
}

pub fn gallery() -> Vec<GalleryCase> {
    let case = |name, graph, n_b, n_c, n_h, winding| GalleryCase { name, graph, n_b, n_c, n_h, winding };
    vec![
        // W = -1: no roots
        case("G0", g0(), 0, 0, 0, 0),
        // W = 3z - 1: bound state at x0 = 1/3
        case("G1(3)", g1(3.0), 1, 0, 0, -2),
        // W = z/2 - 1: root at 2, outside the disk
        case("G1(1/2)", g1(0.5), 0, 0, 0, 0),
        // W = z - 1: half-bound state at +1
        case("G1(1)", g1(1.0), 0, 0, 1, -1),
        // W = 1 - z^2: half-bound states at +-1
        case("G2", g2(), 0, 0, 2, -2),
        // W = z^2 - 1
        case("G3", g3(), 0, 0, 2, 0),
        // W = z^4 - 1: confined state at energy 0, half-bound at +-1
        case("G4", g4(), 0, 1, 2, 0),
    ]
}

/// The random suite: seeds `0..count`, n <= 4, m <= 6, complex weights.
pub fn random_suite(count: u64) -> Vec<(u64, ScatteringGraph)> {
    let cfg = RandomGadgetConfig::default();
    (0..count).map(|s| (s, seeded_gadget(s, &cfg))).collect()
}

pub fn random_circle_points(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)).collect()
}

pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Direct determinant of the block form `[[zA - 1, z B^dagger], [z B, z D - z^2 - 1]]`.
pub fn det_block_gamma(graph: &ScatteringGraph, z: Complex64) -> Complex64 {
    block_gamma(graph, z).determinant()
}

pub fn block_gamma(graph: &ScatteringGraph, z: Complex64) -> DMatrix<Complex64> {
    let (n, m) = (graph.n(), graph.m());
    let one = c(1.0, 0.0);
    let mut g = DMatrix::from_element(n + m, n + m, c(0.0, 0.0));
    let a = graph.a_block();
    let b = graph.b_block();
    let d = graph.d_block();
    for i in 0..n {
        for j in 0..n {
            g[(i, j)] = z * a[(i, j)] - if i == j { one } else { c(0.0, 0.0) };
        }
    }
    for w in 0..m {
        for j in 0..n {
            g[(n + w, j)] = z * b[(w, j)];
            g[(j, n + w)] = z * b[(w, j)].conj();
        }
        for u in 0..m {
            g[(n + w, n + u)] = z * d[(w, u)] - if w == u { z * z + one } else { c(0.0, 0.0) };
        }
    }
    g
}
