mod common;

use common::{block_gamma, c, det_block_gamma, gallery, random_suite};
use graph_scattering::dynamics::truncate;
use graph_scattering::gallery::{g0, g1, g2, g3, g4};
use graph_scattering::smatrix::gamma;
use graph_scattering::spectra::{
    bound_state_catalog, confined_states, count_identity_check, derivative_check, eigenbranches,
    find_crossings, root_census, root_location_report, w_polynomial, ConfinedClass, RootClass,
    DEFAULT_BRANCH_DELTA, DEFAULT_GRID_SIZE,
};
use graph_scattering::{ScatteringGraph, ToleranceConfig};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn assert_coeffs(g: &ScatteringGraph, expect: &[f64]) {
    let w = w_polynomial(g);
    assert_eq!(w.degree, expect.len() - 1);
    assert_eq!(w.coeffs.len(), expect.len());
    for (got, want) in w.coeffs.iter().zip(expect) {
        assert!((got - want).norm() < 1e-12, "{:?} vs {expect:?}", w.coeffs);
    }
}

/// Gadget with one attachment, two internal vertices of on-site energy
/// `lambda` hung off it; `(1, -1)` on the internal pair is confined at `lambda`.
fn split_pendant(lambda: f64) -> ScatteringGraph {
    let mut h = DMatrix::from_element(3, 3, c(0.0, 0.0));
    h[(0, 1)] = c(1.0, 0.0);
    h[(1, 0)] = c(1.0, 0.0);
    h[(0, 2)] = c(1.0, 0.0);
    h[(2, 0)] = c(1.0, 0.0);
    h[(1, 1)] = c(lambda, 0.0);
    h[(2, 2)] = c(lambda, 0.0);
    ScatteringGraph::new(1, 2, h, 1e-12).unwrap()
}

#[test]
fn w_polynomial_examples() {
    assert_coeffs(&g0(), &[-1.0]);
    assert_coeffs(&g1(3.0), &[-1.0, 3.0]);
    assert_coeffs(&g2(), &[1.0, 0.0, -1.0]);
    assert_coeffs(&g3(), &[-1.0, 0.0, 1.0]);
    assert_coeffs(&g4(), &[-1.0, 0.0, 0.0, 0.0, 1.0]);
}

#[test]
fn w_constant_term_and_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for (seed, g) in random_suite(60) {
        let w = w_polynomial(&g);
        let sign = if (g.m() + g.n()) % 2 == 0 { 1.0 } else { -1.0 };
        // interpolation error scales with the largest coefficient
        let big = w.coeffs.iter().map(|co| co.norm()).fold(1.0, f64::max);
        assert!((w.coeffs[0] - sign).norm() <= 1e-13 * big, "seed {seed}: {}", w.coeffs[0]);
        assert!(w.degree <= 2 * g.m() + g.n());
        for _ in 0..20 {
            let z = c(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
            let direct = det_block_gamma(&g, z);
            assert!((w.eval(z) - direct).norm() <= 1e-8 * direct.norm().max(1.0), "seed {seed}");
        }
        // real coefficients: the conjugate of a root is a root
        for co in &w.coeffs {
            assert!(co.im.abs() <= 1e-9 * g.scale().powi(g.dim() as i32));
        }
    }
}

#[test]
fn census_examples() {
    let census = |g: &ScatteringGraph| root_census(&w_polynomial(g), &tol());
    let c0 = census(&g0());
    assert!(c0.roots.is_empty());
    assert_eq!((c0.alpha1, c0.alpha2, c0.alpha3), (0, 0, 0));
    let c2 = census(&g2());
    assert_eq!((c2.alpha1, c2.alpha2, c2.alpha3), (0, 0, 2));
    let c4 = census(&g4());
    assert_eq!((c4.alpha1, c4.alpha2, c4.alpha3), (0, 1, 2));
    assert_eq!(c4.roots_of(RootClass::OnCircleConjugatePair).count(), 2);
    let c1 = census(&g1(3.0));
    assert_eq!((c1.alpha1, c1.alpha2, c1.alpha3), (1, 0, 0));
    assert!((c1.roots[0].value - 1.0 / 3.0).norm() < 1e-14);
}

#[test]
fn census_accounts_for_every_root() {
    for (seed, g) in random_suite(100) {
        let census = root_census(&w_polynomial(&g), &tol());
        assert_eq!(census.total_multiplicity(), census.degree, "seed {seed}");
        let off_axis: Vec<Complex64> = census
            .roots
            .iter()
            .filter(|r| r.value.im.abs() > 1e-8)
            .map(|r| r.value)
            .collect();
        for z in &off_axis {
            assert!(off_axis.iter().any(|w| (w - z.conj()).norm() < 1e-6), "seed {seed}: {z} unpaired");
        }
    }
}

#[test]
fn confined_examples() {
    assert!(confined_states(&g2(), &tol()).unwrap().states.is_empty());
    assert!(confined_states(&g3(), &tol()).unwrap().states.is_empty());
    let c4 = confined_states(&g4(), &tol()).unwrap();
    assert_eq!(c4.states.len(), 1);
    assert_eq!(c4.dim_c_less, 1);
    let s = &c4.states[0];
    assert_eq!(s.class, ConfinedClass::CLess);
    assert!(s.lambda.abs() < 1e-12);
    // beta is (1, -1)/sqrt 2 up to a phase
    let r = 0.5f64.sqrt();
    let overlap = s.beta[0] * r - s.beta[1] * r;
    assert!((overlap.norm() - 1.0).abs() < 1e-12);
}

#[test]
fn confined_states_satisfy_their_equations() {
    for lambda in [0.5, 2.0, 3.0, -2.0, -3.5] {
        let g = split_pendant(lambda);
        for s in confined_states(&g, &tol()).unwrap().states {
            let beta = DVector::from_vec(s.beta.clone());
            let d = g.d_block().into_owned();
            assert!((&d * &beta - &beta * c(s.lambda, 0.0)).norm() <= 1e-9);
            assert!((g.b_block().adjoint() * &beta).norm() <= 1e-9);
        }
    }
}

#[test]
fn confined_state_outside_band_gives_inside_root() {
    let g = split_pendant(3.0);
    let catalog = bound_state_catalog(&g, &tol()).unwrap();
    assert_eq!(catalog.dim_c_greater, 1);
    let zc = (3.0 - 5.0f64.sqrt()) / 2.0;
    assert!(catalog.census.roots.iter().any(|r| (r.value - zc).norm() <= 1e-8));
    assert!(count_identity_check(&g, &tol()).unwrap().pass);
}

#[test]
fn confined_state_at_band_edge_gives_double_root() {
    let g = split_pendant(2.0);
    let catalog = bound_state_catalog(&g, &tol()).unwrap();
    assert_eq!(catalog.dim_c_equal, 1);
    let report = count_identity_check(&g, &tol()).unwrap();
    assert!(report.threshold_identity && report.pass, "{report:?}");
    assert!(report.alpha3 >= 2);
}

#[test]
fn unconfined_bound_state_of_self_loop() {
    let catalog = bound_state_catalog(&g1(3.0), &tol()).unwrap();
    assert_eq!((catalog.n_b, catalog.n_c, catalog.n_h), (1, 0, 0));
    let b = &catalog.unconfined[0];
    assert!((b.x0 - 1.0 / 3.0).abs() < 1e-14);
    assert!((b.energy - 10.0 / 3.0).abs() < 1e-12);
    assert!((b.alpha[0].norm() - 1.0).abs() < 1e-12);
    assert!((b.norm_const - (8.0f64 / 9.0).sqrt()).abs() < 1e-12);
    // independent normalisation: sum the tail directly
    let tail: f64 = (1..200).map(|x| (b.norm_const * b.x0.powi(x - 1)).powi(2)).sum();
    assert!((tail - 1.0).abs() < 1e-10);
}

#[test]
fn half_bound_null_vectors() {
    let check = |g: &ScatteringGraph, expected: &[(f64, Vec<f64>)]| {
        let catalog = bound_state_catalog(g, &tol()).unwrap();
        assert_eq!(catalog.n_h, expected.len());
        for (x0, v) in expected {
            let h = catalog.half_bound.iter().find(|h| (h.x0 - x0).abs() < 1e-12).expect("state at x0");
            let got: Vec<Complex64> = h.alpha.iter().chain(&h.beta).copied().collect();
            let want = DVector::from_iterator(v.len(), v.iter().map(|&a| c(a, 0.0))).normalize();
            let got = DVector::from_vec(got);
            assert!((got.dotc(&want).norm() - 1.0).abs() < 1e-9, "x0 = {x0}");
            assert!((gamma(g, c(*x0, 0.0)) * &got).norm() < 1e-9);
        }
    };
    check(&g2(), &[(1.0, vec![1.0, 1.0]), (-1.0, vec![1.0, -1.0])]);
    check(&g4(), &[(1.0, vec![2.0, 1.0, 1.0]), (-1.0, vec![2.0, -1.0, -1.0])]);
}

#[test]
fn gallery_counts() {
    for case in gallery() {
        let catalog = bound_state_catalog(&case.graph, &tol()).unwrap();
        assert_eq!((catalog.n_b, catalog.n_c, catalog.n_h), (case.n_b, case.n_c, case.n_h), "{}", case.name);
        assert_eq!(catalog.n_c, catalog.dim_c_greater + catalog.dim_c_less + catalog.dim_c_equal);
        assert!(count_identity_check(&case.graph, &tol()).unwrap().pass, "{}", case.name);
    }
    let g4 = bound_state_catalog(&g4(), &tol()).unwrap();
    assert_eq!(g4.bound_state_count, 2.0);
}

#[test]
fn unconfined_states_on_random_gadgets() {
    for (seed, g) in random_suite(100) {
        let catalog = bound_state_catalog(&g, &tol()).unwrap();
        for b in &catalog.unconfined {
            let v = DVector::from_iterator(g.dim(), b.alpha.iter().chain(&b.beta).copied());
            assert!((gamma(&g, c(b.x0, 0.0)) * &v).norm() <= 1e-9 * g.scale(), "seed {seed}");
            assert!(b.alpha.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-12);
            let a2: f64 = b.alpha.iter().map(|a| a.norm_sqr()).sum();
            let b2: f64 = b.beta.iter().map(|a| a.norm_sqr()).sum();
            let n_v = (a2 / (1.0 - b.x0 * b.x0) + b2).powf(-0.5);
            assert!((n_v - b.norm_const).abs() <= 1e-10, "seed {seed}");
            assert!((b.energy - (b.x0 + 1.0 / b.x0)).abs() <= 1e-10 * b.energy.abs().max(1.0));
        }
        assert!(count_identity_check(&g, &tol()).unwrap().pass, "seed {seed}");
    }
}

/// Embeds each unconfined bound state on a lattice with 60 path vertices
/// and checks `H v = E v` away from the cut.
#[test]
fn bound_states_are_lattice_eigenvectors() {
    let tail = 60;
    let mut checked = 0;
    for (seed, g) in random_suite(100).into_iter().chain([(999, g1(3.0))]) {
        let catalog = bound_state_catalog(&g, &tol()).unwrap();
        if catalog.unconfined.is_empty() {
            continue;
        }
        let h = truncate(&g, tail).unwrap();
        let (n, d) = (g.n(), g.dim());
        for b in &catalog.unconfined {
            let mut v = DVector::from_element(h.nrows(), c(0.0, 0.0));
            for (i, a) in b.alpha.iter().chain(&b.beta).enumerate() {
                v[i] = *a;
            }
            for j in 0..n {
                for x in 2..=tail {
                    v[d + j * (tail - 1) + x - 2] = b.alpha[j] * b.x0.powi(x as i32 - 1);
                }
            }
            let r = &h * &v - &v * c(b.energy, 0.0);
            // skip the last vertex of each path, where the cut bites
            let worst = (0..h.nrows())
                .filter(|&i| i < d || (i - d) % (tail - 1) != tail - 2)
                .map(|i| r[i].norm())
                .fold(0.0, f64::max);
            assert!(worst <= 1e-8, "seed {seed}: {worst}");
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn eigenbranch_examples() {
    let t0 = eigenbranches(&g0(), 41, DEFAULT_BRANCH_DELTA, &tol()).unwrap();
    assert_eq!(t0.branches.len(), 1);
    assert!(t0.branches[0].values.iter().all(|&e| (e + 1.0).abs() < 1e-14));
    let t2 = eigenbranches(&g2(), 41, DEFAULT_BRANCH_DELTA, &tol()).unwrap();
    assert_eq!(t2.branches.len(), 2);
    for (t, &x) in t2.grid.iter().enumerate() {
        let mut got: Vec<f64> = t2.branches.iter().map(|b| b.values[t]).collect();
        got.sort_by(f64::total_cmp);
        let mut want = [-1.0 - x, -1.0 + x];
        want.sort_by(f64::total_cmp);
        assert!((got[0] - want[0]).abs() < 1e-12 && (got[1] - want[1]).abs() < 1e-12);
    }
    // G4: one confined direction deflated, and at x = +-1 exactly one of the
    // remaining branches vanishes
    let t4 = eigenbranches(&g4(), 201, DEFAULT_BRANCH_DELTA, &tol()).unwrap();
    assert_eq!(t4.confined.len(), 1);
    assert_eq!(t4.branches.len(), 2);
    let crossings = find_crossings(&g4(), &t4, &tol()).unwrap();
    for x0 in [-1.0, 1.0] {
        assert_eq!(crossings.iter().filter(|c| (c.x0 - x0).abs() < 1e-8).count(), 1, "x0 = {x0}");
    }
}

#[test]
fn eigenbranches_reconstruct_gamma() {
    for (seed, g) in random_suite(30) {
        let table = eigenbranches(&g, DEFAULT_GRID_SIZE, DEFAULT_BRANCH_DELTA, &tol()).unwrap();
        assert!(table.min_adjacent_overlap >= 0.9, "seed {seed}");
        for t in (0..table.grid.len()).step_by(20) {
            assert!(table.reconstruction_defect(&g, t) <= 1e-9 * g.scale(), "seed {seed}");
        }
        // independent rebuild from the table contents
        let t = table.grid.len() / 3;
        let x = table.grid[t];
        let mut rebuilt = DMatrix::from_element(g.dim(), g.dim(), c(0.0, 0.0));
        for b in &table.branches {
            let v = DVector::from_vec(b.vectors[t].clone());
            rebuilt += &v * v.adjoint() * c(b.values[t], 0.0);
        }
        for (lambda, vec) in &table.confined {
            let v = DVector::from_vec(vec.clone());
            rebuilt += &v * v.adjoint() * c(x * lambda - x * x - 1.0, 0.0);
        }
        let diff = (rebuilt - block_gamma(&g, c(x, 0.0))).iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(diff <= 1e-9 * g.scale(), "seed {seed}: {diff}");
    }
}

#[test]
fn derivative_examples() {
    let t1 = eigenbranches(&g1(3.0), DEFAULT_GRID_SIZE, DEFAULT_BRANCH_DELTA, &tol()).unwrap();
    let cr = find_crossings(&g1(3.0), &t1, &tol()).unwrap();
    assert_eq!(cr.len(), 1);
    let r = derivative_check(&g1(3.0), &cr[0]).unwrap();
    assert!((r.analytic - 3.0).abs() < 1e-10 && r.pass);
    assert_eq!(r.sign_matches, Some(true));

    let t2 = eigenbranches(&g2(), DEFAULT_GRID_SIZE, DEFAULT_BRANCH_DELTA, &tol()).unwrap();
    let cr = find_crossings(&g2(), &t2, &tol()).unwrap();
    assert_eq!(cr.len(), 2);
    for crossing in &cr {
        let r = derivative_check(&g2(), crossing).unwrap();
        assert!((r.analytic - crossing.x0.signum()).abs() < 1e-10, "{r:?}");
        assert!(r.pass);
    }
}

#[test]
fn root_location_laws() {
    for (seed, g) in random_suite(100) {
        let census = root_census(&w_polynomial(&g), &tol());
        let report = root_location_report(&g, &census, &tol()).unwrap();
        assert!(report.max_inside_imaginary <= 1e-7, "seed {seed}");
        assert!(report.max_circle_attachment_weight <= 1e-8, "seed {seed}");
    }
    let census = root_census(&w_polynomial(&g4()), &tol());
    let report = root_location_report(&g4(), &census, &tol()).unwrap();
    assert_eq!(report.circle_roots_checked, 2);
    assert!(report.max_circle_attachment_weight <= 1e-8);
}
