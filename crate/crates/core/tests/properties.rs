use proptest::prelude::*;
use qgraph::graph::{build_graph, partition, CutSet, GraphPoint, MetricGraph};
use qgraph::morse::{node_count, representatives};
use qgraph::partition::{lambda_d, lambda_n};
use qgraph::spectral::{eigenfunction_basis, eigenvalue_count_check, eigenvalue_list, eigenvalues, inner, BoundaryCondition, Skeleton};
use qgraph::zoo::{self, Lcg};

fn tree(seed: u64) -> MetricGraph {
    let mut rng = Lcg::new(seed);
    let edges = 1 + rng.below(5);
    zoo::random_tree(edges, &mut rng).unwrap()
}

fn graph(seed: u64) -> MetricGraph {
    let mut rng = Lcg::new(seed);
    let edges = 2 + rng.below(3);
    zoo::random_graph(edges, rng.below(2), &mut rng).unwrap()
}

fn lengths(g: &MetricGraph) -> Vec<f64> {
    g.edges().iter().map(|e| e.length).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn basis_is_orthonormal_and_satisfies_vertex_conditions(seed in 0u64..10_000) {
        let g = graph(seed);
        let sk = Skeleton::from_graph(&g, &BoundaryCondition::Standard).unwrap();
        let ls = lengths(&g);
        for pair in eigenvalues(&g, &BoundaryCondition::Standard, 6).unwrap() {
            let b = &pair.basis;
            prop_assert_eq!(b.len(), pair.multiplicity);
            for i in 0..b.len() {
                prop_assert!(sk.vertex_residual(&b[i]) < 1e-8);
                for j in 0..b.len() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    prop_assert!((inner(&ls, &b[i], &b[j]) - expected).abs() < 1e-8);
                }
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference(seed in 0u64..10_000) {
        let g = tree(seed);
        let pairs = eigenvalues(&g, &BoundaryCondition::Standard, 4).unwrap();
        let f = &pairs.last().unwrap().basis[0];
        for (e, edge) in g.edges().iter().enumerate() {
            let x = 0.37 * edge.length;
            let h = 1e-6;
            let fd = (f.eval(e, x + h).0 - f.eval(e, x - h).0) / (2.0 * h);
            prop_assert!((fd - f.eval(e, x).1).abs() < 1e-5 * (1.0 + f.k));
        }
    }

    #[test]
    fn scan_agrees_with_exact_count_and_weyl(seed in 0u64..10_000) {
        let g = graph(seed);
        let r = eigenvalue_count_check(&g, &BoundaryCondition::Standard, 12.0).unwrap();
        prop_assert!(r.holds);
        prop_assert!(!r.missed_root_suspected);
    }

    #[test]
    fn scaling_lengths_scales_eigenvalues(seed in 0u64..10_000, c in 0.5f64..2.0) {
        let g = tree(seed);
        let mut spec = g.to_spec();
        for e in &mut spec.edges {
            e.length *= c;
        }
        let h = build_graph(&spec).unwrap();
        let a = eigenvalue_list(&eigenvalues(&g, &BoundaryCondition::Standard, 5).unwrap(), 5);
        let b = eigenvalue_list(&eigenvalues(&h, &BoundaryCondition::Standard, 5).unwrap(), 5);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x / (c * c) - y).abs() < 1e-8 * (1.0 + x));
        }
    }

    #[test]
    fn dirichlet_vertices_never_lower_eigenvalues(seed in 0u64..10_000) {
        let g = tree(seed);
        let mut set: Vec<String> = Vec::new();
        let mut prev = eigenvalue_list(&eigenvalues(&g, &BoundaryCondition::Standard, 5).unwrap(), 5);
        for v in g.vertices() {
            set.push(v.id.clone());
            let bc = BoundaryCondition::dirichlet(set.clone());
            let cur = eigenvalue_list(&eigenvalues(&g, &bc, 5).unwrap(), 5);
            for (a, b) in prev.iter().zip(&cur) {
                prop_assert!(b >= &(a - 1e-9 * (1.0 + a)));
            }
            prev = cur;
        }
    }

    #[test]
    fn json_round_trip_preserves_graph(seed in 0u64..10_000) {
        let g = graph(seed);
        let text = serde_json::to_string(&g.to_spec()).unwrap();
        let h = MetricGraph::from_json(&text).unwrap();
        prop_assert_eq!(g.to_spec(), h.to_spec());
    }

    #[test]
    fn cuts_preserve_total_length(seed in 0u64..10_000, u in 0.05f64..0.95, w in 0.05f64..0.95) {
        let g = graph(seed);
        let e1 = &g.edges()[0];
        let e2 = g.edges().last().unwrap();
        let cuts = CutSet {
            interior: vec![GraphPoint::new(e1.id.clone(), u * e1.length), GraphPoint::new(e2.id.clone(), w * e2.length)],
            splits: vec![],
        };
        if let Ok(p) = partition(&g, &cuts) {
            let total: f64 = p.clusters.iter().map(|c| c.total_length()).sum();
            prop_assert!((total - g.total_length()).abs() < 1e-12 * g.total_length());
            let n = lambda_n(&p).unwrap();
            let d = lambda_d(&p).unwrap();
            prop_assert_eq!(n.values.len(), p.len());
            prop_assert_eq!(d.values.len(), p.len());
        }
    }

    #[test]
    fn tree_eigenfunctions_obey_courant_bound(seed in 0u64..10_000) {
        let g = tree(seed);
        let mut first = 1;
        for pair in eigenvalues(&g, &BoundaryCondition::Standard, 8).unwrap() {
            for f in representatives(&g, &pair) {
                prop_assert!(node_count(&g, &f) < first.max(1));
            }
            first += pair.multiplicity;
        }
    }

    #[test]
    fn eigenfunction_basis_is_reproducible(seed in 0u64..10_000) {
        let g = tree(seed);
        let pairs = eigenvalues(&g, &BoundaryCondition::Standard, 3).unwrap();
        let again = eigenfunction_basis(&g, &BoundaryCondition::Standard, &pairs[1]).unwrap();
        prop_assert_eq!(&again, &pairs[1].basis);
    }
}
