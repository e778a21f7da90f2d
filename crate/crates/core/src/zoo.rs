//! Built-in graphs: path, 3-star, tadpole and seeded random trees.

use std::f64::consts::PI;

use crate::error::GraphError;
use crate::graph::{build_graph, EdgeSpec, GraphSpec, MetricGraph};

/// Default length perturbation of the third star edge.
pub const STAR_EPSILON: f64 = 0.1;

/// 64-bit linear congruential generator with Knuth's MMIX constants
/// `a = 6364136223846793005`, `c = 1442695040888963407`.
#[derive(Debug, Clone)]
pub struct Lcg {
    state: u64,
}

impl Lcg {
    pub const A: u64 = 6364136223846793005;
    pub const C: u64 = 1442695040888963407;

    pub fn new(seed: u64) -> Self {
        let mut g = Lcg { state: seed };
        g.next_u64();
        g
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(Self::A).wrapping_add(Self::C);
        self.state
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        ((self.next_u64() >> 33) % n as u64) as usize
    }
}

fn edge(id: &str, from: &str, to: &str, length: f64) -> EdgeSpec {
    EdgeSpec { id: id.into(), from: from.into(), to: to.into(), length }
}

/// Interval `[0, L]` with vertices `a`, `b` and edge `e`.
pub fn path(length: f64) -> Result<MetricGraph, GraphError> {
    build_graph(&GraphSpec { vertices: vec!["a".into(), "b".into()], edges: vec![edge("e", "a", "b", length)] })
}

/// Star with centre `c`, leaves `l1..l3` and edges `e1..e3` oriented outward.
pub fn star3(lengths: [f64; 3]) -> Result<MetricGraph, GraphError> {
    build_graph(&GraphSpec {
        vertices: ["c", "l1", "l2", "l3"].iter().map(|s| s.to_string()).collect(),
        edges: vec![
            edge("e1", "c", "l1", lengths[0]),
            edge("e2", "c", "l2", lengths[1]),
            edge("e3", "c", "l3", lengths[2]),
        ],
    })
}

/// Star with lengths `1, 1, 1 + ε`.
pub fn perturbed_star3(epsilon: f64) -> Result<MetricGraph, GraphError> {
    star3([1.0, 1.0, 1.0 + epsilon])
}

/// Loop `loop` at `a` plus the tail `tail` from `a` to `b`.
pub fn tadpole(loop_length: f64, tail_length: f64) -> Result<MetricGraph, GraphError> {
    build_graph(&GraphSpec {
        vertices: vec!["a".into(), "b".into()],
        edges: vec![edge("loop", "a", "a", loop_length), edge("tail", "a", "b", tail_length)],
    })
}

/// The tadpole with loop and tail both of length `2π`.
pub fn standard_tadpole() -> MetricGraph {
    tadpole(2.0 * PI, 2.0 * PI).expect("valid tadpole")
}

fn vertex_name(i: usize) -> String {
    format!("v{i}")
}

fn edge_name(i: usize) -> String {
    format!("e{i}")
}

/// Tree with `edges` edges: uniform Prüfer-sequence topology, lengths uniform in `[0.5, 1.5]`.
pub fn random_tree(edges: usize, rng: &mut Lcg) -> Result<MetricGraph, GraphError> {
    let spec = random_tree_spec(edges.max(1), rng);
    build_graph(&spec)
}

fn random_tree_spec(edges: usize, rng: &mut Lcg) -> GraphSpec {
    let n = edges + 1;
    let seq: Vec<usize> = (0..n.saturating_sub(2)).map(|_| rng.below(n)).collect();
    let mut degree = vec![1usize; n];
    for &s in &seq {
        degree[s] += 1;
    }
    let mut pairs = Vec::with_capacity(edges);
    for &s in &seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
        pairs.push((leaf, s));
        degree[leaf] -= 1;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    pairs.push((rest[0], rest[1]));
    GraphSpec {
        vertices: (0..n).map(vertex_name).collect(),
        edges: pairs
            .into_iter()
            .enumerate()
            .map(|(i, (a, b))| EdgeSpec {
                id: edge_name(i),
                from: vertex_name(a.min(b)),
                to: vertex_name(a.max(b)),
                length: rng.uniform(0.5, 1.5),
            })
            .collect(),
    }
}

/// Random tree plus `extra` additional edges between random vertices (loops
/// and parallel edges allowed), giving first Betti number `extra`.
pub fn random_graph(tree_edges: usize, extra: usize, rng: &mut Lcg) -> Result<MetricGraph, GraphError> {
    let mut spec = random_tree_spec(tree_edges.max(1), rng);
    let n = spec.vertices.len();
    for j in 0..extra {
        let a = rng.below(n);
        let b = rng.below(n);
        spec.edges.push(EdgeSpec {
            id: format!("x{j}"),
            from: vertex_name(a.min(b)),
            to: vertex_name(a.max(b)),
            length: rng.uniform(0.5, 1.5),
        });
    }
    build_graph(&spec)
}

/// The seeded family of random trees used by the verification suites:
/// tree `i` has `2 + (draw mod 4)` edges.
pub fn random_tree_family(count: usize, seed: u64) -> Vec<MetricGraph> {
    let mut rng = Lcg::new(seed);
    (0..count)
        .map(|_| {
            let m = 2 + rng.below(4);
            random_tree(m, &mut rng).expect("random trees are valid")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lcg_is_reproducible() {
        let mut a = Lcg::new(7);
        let mut b = Lcg::new(7);
        for _ in 0..10 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
        let x = a.next_f64();
        assert!((0.0..1.0).contains(&x));
    }

    #[test]
    fn random_trees_are_trees() {
        let mut rng = Lcg::new(3);
        for m in 1..8 {
            let g = random_tree(m, &mut rng).unwrap();
            assert_eq!(g.edge_count(), m);
            assert!(g.is_tree());
            assert!(g.edges().iter().all(|e| (0.5..=1.5).contains(&e.length)));
        }
    }

    #[test]
    fn random_graph_betti() {
        let mut rng = Lcg::new(11);
        let g = random_graph(4, 1, &mut rng).unwrap();
        assert_eq!(g.betti_number(), 1);
    }

    #[test]
    fn zoo_shapes() {
        assert_eq!(standard_tadpole().betti_number(), 1);
        assert!((standard_tadpole().total_length() - 4.0 * PI).abs() < 1e-12);
        assert!((perturbed_star3(STAR_EPSILON).unwrap().total_length() - 3.1).abs() < 1e-12);
        assert!(path(1.0).unwrap().is_tree());
    }
}
