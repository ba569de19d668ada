use graph_scattering::gallery::{g0, g2, g3, seeded_gadget, RandomGadgetConfig};
use graph_scattering::graph::parse_graph;
use graph_scattering::{load_graph, projector_pn, Error, ScatteringGraph};
use proptest::prelude::*;

#[test]
fn projector_examples() {
    assert_eq!(projector_pn(&g0()).as_slice(), &[1.0]);
    assert_eq!(projector_pn(&g2()), nalgebra::DMatrix::identity(2, 2));
    let p = projector_pn(&g3());
    assert_eq!(p, nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1.0, 0.0])));
}

#[test]
fn shipped_graph_files_load() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/examples/graphs");
    for name in ["g0", "g1", "g2", "g3", "g4", "flux_triangle"] {
        let g = load_graph(format!("{dir}/{name}.json")).unwrap();
        assert!(g.n() >= 1, "{name}");
    }
    assert!(matches!(load_graph(format!("{dir}/broken.json")), Err(Error::Validation(_))));
    assert!(matches!(load_graph(format!("{dir}/missing.json")), Err(Error::Io(_))));
}

#[test]
fn explicit_full_matrix_accepted() {
    let text = r#"{"n":2,"m":0,"entries":[
        {"i":0,"j":1,"re":1,"im":2},{"i":1,"j":0,"re":1,"im":-2}]}"#;
    let (g, _) = parse_graph(text).unwrap();
    assert_eq!(g.hhat()[(1, 0)], num_complex::Complex64::new(1.0, -2.0));
}

#[test]
fn rejects_zero_paths() {
    assert!(parse_graph(r#"{"n":0,"m":1,"entries":[]}"#).is_err());
}

fn arb_graph() -> impl Strategy<Value = ScatteringGraph> {
    (any::<u64>(), 1usize..5, 0usize..5, any::<bool>()).prop_map(|(seed, n, m, imaginary)| {
        let cfg = RandomGadgetConfig { n_min: n, n_max: n, m_min: m, m_max: m, imaginary, ..Default::default() };
        seeded_gadget(seed, &cfg)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn save_load_round_trip_is_bit_exact(g in arb_graph()) {
        let (back, _) = parse_graph(&g.to_json()).unwrap();
        prop_assert_eq!(back.hhat(), g.hhat());
        prop_assert_eq!((back.n(), back.m()), (g.n(), g.m()));
    }

    #[test]
    fn loaded_graphs_are_hermitian(g in arb_graph()) {
        let h = g.hhat();
        prop_assert_eq!(h, &h.adjoint());
    }

    #[test]
    fn projector_is_idempotent(g in arb_graph()) {
        let p = projector_pn(&g);
        prop_assert_eq!(&p * &p, p);
    }

    #[test]
    fn blocks_tile_the_matrix(g in arb_graph()) {
        let (n, m) = (g.n(), g.m());
        let h = g.hhat();
        prop_assert_eq!(g.a_block().shape(), (n, n));
        prop_assert_eq!(g.b_block().shape(), (m, n));
        prop_assert_eq!(g.d_block().shape(), (m, m));
        for w in 0..m {
            for j in 0..n {
                prop_assert_eq!(g.b_block()[(w, j)], h[(n + w, j)]);
            }
        }
    }
}
