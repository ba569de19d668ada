mod common;

use std::f64::consts::PI;

use common::{c, gallery, random_suite};
use graph_scattering::completeness::{
    bound_projection, completeness_defect, scattering_overlap_integral, window, DEFAULT_X_CUT,
};
use graph_scattering::gallery::{g0, g1, g4};
use graph_scattering::quadrature::QuadratureConfig;
use graph_scattering::smatrix::Vertex;
use graph_scattering::spectra::bound_state_catalog;
use graph_scattering::ToleranceConfig;
use num_complex::Complex64;

/// Composite midpoint rule over `(-pi, 0)`, independent of the library's
/// adaptive quadrature.
fn midpoint(f: impl Fn(f64) -> Complex64, panels: usize) -> Complex64 {
    let h = PI / panels as f64;
    (0..panels).map(|i| f(-PI + h * (i as f64 + 0.5))).sum::<Complex64>() * h
}

/// `<x|sc(k)>` on a single path with reflection `s`: `z^-x + s z^x`.
fn single_path_amplitude(s: Complex64, k: f64, x: i32) -> Complex64 {
    let z = Complex64::from_polar(1.0, k);
    z.powi(-x) + s * z.powi(x)
}

fn tight() -> QuadratureConfig {
    QuadratureConfig::with_target(1e-12)
}

fn attachment() -> Vertex {
    Vertex::Path { path: 0, x: 1 }
}

#[test]
fn g0_attachment_overlap_is_one() {
    let tol = ToleranceConfig::default();
    let got = scattering_overlap_integral(&g0(), attachment(), attachment(), &tight(), &tol).unwrap();
    // S = -1, so |<1|sc>|^2 = 4 sin^2 k
    let oracle = midpoint(|k| c(4.0 * k.sin().powi(2) / (2.0 * PI), 0.0), 20_000);
    assert!((got.value - 1.0).norm() < 1e-6);
    assert!((got.value - oracle).norm() < 1e-9);
}

#[test]
fn g1_attachment_overlap_is_one_ninth() {
    let tol = ToleranceConfig::default();
    let got = scattering_overlap_integral(&g1(3.0), attachment(), attachment(), &tight(), &tol).unwrap();
    let oracle = midpoint(
        |k| {
            let z = Complex64::from_polar(1.0, k);
            let s = -(z - 3.0) / (z * (1.0 - 3.0 * z));
            c(single_path_amplitude(s, k, 1).norm_sqr() / (2.0 * PI), 0.0)
        },
        40_000,
    );
    assert!((got.value - 1.0 / 9.0).norm() < 1e-6);
    assert!((got.value - oracle).norm() < 1e-9);
}

#[test]
fn g0_neighbouring_vertices_are_orthogonal() {
    let tol = ToleranceConfig::default();
    let w = Vertex::Path { path: 0, x: 2 };
    let got = scattering_overlap_integral(&g0(), attachment(), w, &tight(), &tol).unwrap();
    let oracle = midpoint(
        |k| single_path_amplitude(c(-1.0, 0.0), k, 1) * single_path_amplitude(c(-1.0, 0.0), k, 2).conj()
            / (2.0 * PI),
        20_000,
    );
    assert!(got.value.norm() < 1e-6);
    assert!((got.value - oracle).norm() < 1e-9);
}

#[test]
fn defect_examples() {
    let tol = ToleranceConfig::default();
    let quad = QuadratureConfig::default();
    for (g, x_cut, bound) in [(g0(), 4, 1e-6), (g1(3.0), 4, 1e-6), (g4(), 3, 1e-4)] {
        let r = completeness_defect(&g, x_cut, &quad, &tol).unwrap();
        assert!(r.max_deviation <= bound, "{}", r.max_deviation);
        assert!(r.pass);
        assert!(r.hermiticity_defect <= 1e-10);
        assert_eq!(r.window.len(), g.m() + g.n() * x_cut);
    }
}

#[test]
fn gallery_at_default_window() {
    let tol = ToleranceConfig::default();
    for case in gallery() {
        let r = completeness_defect(&case.graph, DEFAULT_X_CUT, &QuadratureConfig::default(), &tol).unwrap();
        assert!(r.max_deviation <= r.acceptance_tolerance, "{}: {}", case.name, r.max_deviation);
        assert_eq!(r.half_bound_endpoints, case.n_h > 0, "{}", case.name);
        assert!(r.hermiticity_defect <= 1e-10, "{}", case.name);
    }
}

#[test]
fn small_window_is_rejected() {
    let r = completeness_defect(&g0(), 1, &QuadratureConfig::default(), &ToleranceConfig::default());
    assert!(r.is_err());
}

#[test]
fn confined_states_do_not_touch_paths() {
    let tol = ToleranceConfig::default();
    let g = g4();
    let catalog = bound_state_catalog(&g, &tol).unwrap();
    assert_eq!(catalog.n_c, 1);
    let win = window(&g, 4);
    for &v in &win {
        for &w in &win {
            let (_, confined) = bound_projection(&catalog, v, w);
            if matches!(v, Vertex::Path { .. }) || matches!(w, Vertex::Path { .. }) {
                assert_eq!(confined, c(0.0, 0.0));
            }
        }
    }
}

#[test]
fn halving_panels_shrinks_the_estimate() {
    let tol = ToleranceConfig::default();
    // an infinite target leaves the initial uniform panels unrefined
    let uniform = |panels| QuadratureConfig {
        target: f64::INFINITY,
        initial_panels: panels,
        ..QuadratureConfig::default()
    };
    for g in [g0(), g1(3.0)] {
        let mut previous = completeness_defect(&g, 4, &uniform(1), &tol).unwrap().quad_error_estimate;
        for panels in [2, 4, 8] {
            let next = completeness_defect(&g, 4, &uniform(panels), &tol).unwrap().quad_error_estimate;
            if previous < 1e-13 {
                break;
            }
            assert!(next <= previous / 2.0, "{panels} panels: {previous:e} -> {next:e}");
            previous = next;
        }
    }
}

#[test]
fn tightening_the_target_does_not_worsen_the_defect() {
    let tol = ToleranceConfig::default();
    for g in [g0(), g1(3.0), g4()] {
        let mut previous = f64::INFINITY;
        for target in [1e-4, 1e-6, 1e-8, 1e-10] {
            let r = completeness_defect(&g, 4, &QuadratureConfig::with_target(target), &tol).unwrap();
            assert!(r.max_deviation <= 2.0 * previous.max(1e-15), "target {target:e}");
            previous = r.max_deviation;
        }
    }
}

#[test]
fn random_gadgets_resolve_the_identity() {
    let tol = ToleranceConfig::default();
    for (seed, g) in random_suite(8) {
        let r = completeness_defect(&g, 3, &QuadratureConfig::default(), &tol).unwrap();
        assert!(r.max_deviation <= r.acceptance_tolerance, "seed {seed}: {}", r.max_deviation);
        assert!(r.hermiticity_defect <= 1e-10, "seed {seed}");
    }
}
