use proptest::prelude::*;

use fitzcalc_core::convexfn::j_transform;
use fitzcalc_core::enlarge::{prox_point, te_gap};
use fitzcalc_core::fitz::{phi_exact, phi_of, s_of};
use fitzcalc_core::operator::{is_monotone_set, membership};
use fitzcalc_core::space::monotone_product;
use fitzcalc_core::{ExtReal, FiniteGraph, OperatorSpec, PairPoint, Window};

fn coord() -> impl Strategy<Value = f64> {
    (-8i32..=8).prop_map(|k| k as f64 * 0.25)
}

fn point1() -> impl Strategy<Value = PairPoint> {
    (coord(), coord()).prop_map(|(x, xs)| PairPoint::scalar(x, xs))
}

fn graph1() -> impl Strategy<Value = FiniteGraph> {
    prop::collection::vec((coord(), coord()), 1..8).prop_map(|v| FiniteGraph::from_scalars(&v))
}

fn pieces1() -> impl Strategy<Value = Vec<(Vec<f64>, f64)>> {
    prop::collection::vec((coord(), coord()).prop_map(|(c, d)| (vec![c], d)), 1..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_at_least_pi_on_the_graph(g in graph1()) {
        let phi = phi_of(&g).unwrap();
        for p in g.points() {
            let v = phi.eval(p).unwrap().to_f64();
            prop_assert!(v >= p.duality() - 1e-12);
        }
    }

    #[test]
    fn phi_equals_pi_on_monotone_graphs(g in graph1()) {
        prop_assume!(is_monotone_set(&g).unwrap().monotone);
        let phi = phi_of(&g).unwrap();
        for p in g.points() {
            prop_assert!((phi.eval(p).unwrap().to_f64() - p.duality()).abs() <= 1e-12);
        }
    }

    #[test]
    fn j_of_s_is_phi(g in graph1(), z in point1()) {
        let phi = phi_of(&g).unwrap().eval(&z).unwrap();
        let js = j_transform(&s_of(&g).unwrap()).unwrap().eval(&z).unwrap();
        prop_assert!((phi.to_f64() - js.to_f64()).abs() <= 1e-8, "{phi} vs {js}");
    }

    #[test]
    fn monotone_product_is_symmetric(p in point1(), q in point1()) {
        prop_assert_eq!(monotone_product(&p, &q).unwrap(), monotone_product(&q, &p).unwrap());
    }

    #[test]
    fn prox_lands_on_the_graph(pieces in pieces1(), z in point1(), alpha in 0.1f64..10.0) {
        let spec = OperatorSpec::subdiff(pieces).unwrap();
        let p = prox_point(&spec, &z.x, &z.xs, alpha).unwrap().expect("prox exists");
        prop_assert!(membership(&spec, &p, 1e-8).unwrap(), "{p}");
        // v = xs - α(u - x)
        prop_assert!((p.xs[0] - (z.xs[0] - alpha * (p.x[0] - z.x[0]))).abs() <= 1e-9);
    }

    #[test]
    fn enlargement_gap_matches_phi(pieces in pieces1(), z in point1()) {
        let spec = OperatorSpec::subdiff(pieces).unwrap();
        let w = Window::cube(1, -2.0, 2.0, 9).unwrap();
        let gap = te_gap(&spec, &z, &w).unwrap();
        prop_assert!(gap.exact);
        match phi_exact(&spec, &z).unwrap() {
            ExtReal::Finite(v) => prop_assert!((gap.infimum.unwrap() - (z.duality() - v)).abs() <= 1e-9),
            ExtReal::PosInf => prop_assert!(gap.infimum.is_none()),
        }
    }

    #[test]
    fn graph_points_have_zero_gap(pieces in pieces1(), x in coord()) {
        let spec = OperatorSpec::subdiff(pieces).unwrap();
        let w = Window::cube(1, -2.0, 2.0, 9).unwrap();
        let p = prox_point(&spec, &[x], &[0.0], 1.0).unwrap().unwrap();
        let gap = te_gap(&spec, &p, &w).unwrap();
        prop_assert!(gap.infimum.unwrap().abs() <= 1e-9, "{:?}", gap);
    }
}
