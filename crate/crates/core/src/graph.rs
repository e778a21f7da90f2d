//! Compact metric graphs, points on them, cuts and partitions.
//!
//! A [`MetricGraph`] is a finite set of vertices joined by edges that carry a
//! positive length and a fixed orientation `from -> to`; the coordinate on an
//! edge runs over `[0, length]`. Loops and parallel edges are allowed.
//! Vertices and edges are kept sorted by id so every derived quantity is
//! reproducible.
//!
//! Cutting a graph ([`apply_cut`]) keeps the edge set (up to subdividing
//! edges at interior cut points) and replaces vertices by one copy per group
//! of a vertex split. Vertices created this way are flagged as cut-created;
//! they form the boundary of the clusters returned by [`components`].

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::GraphError;

/// JSON form of a graph: `{"vertices": [...], "edges": [{"id","from","to","length"}]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<EdgeSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSpec {
    pub id: String,
    pub from: String,
    pub to: String,
    pub length: f64,
}

impl GraphSpec {
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    From,
    To,
}

/// One end of an edge, as seen from the vertex it is attached to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EdgeEnd {
    pub edge_id: String,
    pub end: End,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub id: String,
    /// True for vertices introduced by a cut.
    pub cut_created: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub from: usize,
    pub to: usize,
    pub length: f64,
    /// Edge of the uncut ancestor graph this edge is a piece of.
    pub origin_edge: String,
    /// Coordinate of this edge's `from` end inside `origin_edge`.
    pub origin_offset: f64,
}

impl Edge {
    pub fn endpoint(&self, end: End) -> usize {
        match end {
            End::From => self.from,
            End::To => self.to,
        }
    }

    pub fn is_loop(&self) -> bool {
        self.from == self.to
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    incidence: Vec<Vec<(usize, End)>>,
}

/// Validate a graph description and return a connected [`MetricGraph`].
pub fn build_graph(spec: &GraphSpec) -> Result<MetricGraph, GraphError> {
    let mut seen = HashMap::new();
    for v in &spec.vertices {
        if v.is_empty() || seen.insert(v.as_str(), ()).is_some() {
            return Err(GraphError::BadIdentifier(v.clone()));
        }
    }
    if spec.edges.is_empty() {
        return Err(GraphError::EmptyGraph);
    }
    let mut edge_ids = HashMap::new();
    for e in &spec.edges {
        if e.id.is_empty() || edge_ids.insert(e.id.as_str(), ()).is_some() {
            return Err(GraphError::BadIdentifier(e.id.clone()));
        }
        if !(e.length.is_finite() && e.length > 0.0) {
            return Err(GraphError::ZeroOrNegativeLength { edge: e.id.clone(), length: e.length });
        }
        for v in [&e.from, &e.to] {
            if !seen.contains_key(v.as_str()) {
                return Err(GraphError::DanglingEndpoint { edge: e.id.clone(), vertex: v.clone() });
            }
        }
    }
    let vertices = spec
        .vertices
        .iter()
        .map(|id| Vertex { id: id.clone(), cut_created: false })
        .collect();
    let edges = spec
        .edges
        .iter()
        .map(|e| RawEdge {
            id: e.id.clone(),
            from: e.from.clone(),
            to: e.to.clone(),
            length: e.length,
            origin_edge: e.id.clone(),
            origin_offset: 0.0,
        })
        .collect();
    let g = MetricGraph::assemble(vertices, edges);
    let components = g.component_count();
    if components != 1 {
        return Err(GraphError::Disconnected { components });
    }
    Ok(g)
}

struct RawEdge {
    id: String,
    from: String,
    to: String,
    length: f64,
    origin_edge: String,
    origin_offset: f64,
}

impl MetricGraph {
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        build_graph(&GraphSpec::from_json(text)?)
    }

    fn assemble(mut vertices: Vec<Vertex>, mut raw: Vec<RawEdge>) -> Self {
        vertices.sort_by(|a, b| a.id.cmp(&b.id));
        raw.sort_by(|a, b| a.id.cmp(&b.id));
        let index: HashMap<&str, usize> =
            vertices.iter().enumerate().map(|(i, v)| (v.id.as_str(), i)).collect();
        let edges: Vec<Edge> = raw
            .into_iter()
            .map(|e| Edge {
                from: index[e.from.as_str()],
                to: index[e.to.as_str()],
                id: e.id,
                length: e.length,
                origin_edge: e.origin_edge,
                origin_offset: e.origin_offset,
            })
            .collect();
        let mut incidence = vec![Vec::new(); vertices.len()];
        for (i, e) in edges.iter().enumerate() {
            incidence[e.from].push((i, End::From));
            incidence[e.to].push((i, End::To));
        }
        MetricGraph { vertices, edges, incidence }
    }

    pub fn to_spec(&self) -> GraphSpec {
        GraphSpec {
            vertices: self.vertices.iter().map(|v| v.id.clone()).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeSpec {
                    id: e.id.clone(),
                    from: self.vertices[e.from].id.clone(),
                    to: self.vertices[e.to].id.clone(),
                    length: e.length,
                })
                .collect(),
        }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertex_index(&self, id: &str) -> Option<usize> {
        self.vertices.binary_search_by(|v| v.id.as_str().cmp(id)).ok()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.binary_search_by(|e| e.id.as_str().cmp(id)).ok()
    }

    /// Edge ends attached to vertex `v`, ordered by (edge index, end).
    pub fn incident(&self, v: usize) -> &[(usize, End)] {
        &self.incidence[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incidence[v].len()
    }

    pub fn total_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).sum()
    }

    pub fn min_edge_length(&self) -> f64 {
        self.edges.iter().map(|e| e.length).fold(f64::INFINITY, f64::min)
    }

    /// Component label per vertex, labels numbered in order of first vertex.
    pub fn component_labels(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.vertices.len());
        for e in &self.edges {
            uf.union(e.from, e.to);
        }
        let mut label = vec![usize::MAX; self.vertices.len()];
        let mut root_label = HashMap::new();
        for (v, l) in label.iter_mut().enumerate() {
            let next = root_label.len();
            *l = *root_label.entry(uf.find(v)).or_insert(next);
        }
        label
    }

    pub fn component_count(&self) -> usize {
        self.component_labels().into_iter().max().map_or(0, |m| m + 1)
    }

    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    /// First Betti number `|E| - |V| + (number of components)`.
    pub fn betti_number(&self) -> usize {
        self.edges.len() + self.component_count() - self.vertices.len()
    }

    pub fn is_tree(&self) -> bool {
        self.betti_number() == 0
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.degree(v) == 1).collect()
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.vertices.len()).filter(|&v| self.vertices[v].cut_created).collect()
    }

    /// Resolve a point to `(edge index, coordinate)`.
    pub fn locate(&self, p: &GraphPoint) -> Result<(usize, f64), GraphError> {
        let e = self
            .edge_index(&p.edge_id)
            .ok_or_else(|| GraphError::CutPointOffGraph { edge: p.edge_id.clone(), x: p.x })?;
        let len = self.edges[e].length;
        if !(p.x.is_finite() && p.x >= 0.0 && p.x <= len) {
            return Err(GraphError::CutPointOffGraph { edge: p.edge_id.clone(), x: p.x });
        }
        Ok((e, p.x))
    }

    /// Canonical point for vertex `v`: the lowest incident edge end.
    pub fn vertex_point(&self, v: usize) -> GraphPoint {
        let (e, end) = self.incidence[v][0];
        let edge = &self.edges[e];
        let x = match end {
            End::From => 0.0,
            End::To => edge.length,
        };
        GraphPoint { edge_id: edge.id.clone(), x, vertex: Some(self.vertices[v].id.clone()) }
    }

    pub fn edge_end(&self, e: usize, end: End) -> EdgeEnd {
        EdgeEnd { edge_id: self.edges[e].id.clone(), end }
    }
}

/// A point of the graph addressed by edge and coordinate in the edge's orientation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphPoint {
    pub edge_id: String,
    pub x: f64,
    /// Set when the point is a vertex.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<String>,
}

impl GraphPoint {
    pub fn new(edge_id: impl Into<String>, x: f64) -> Self {
        GraphPoint { edge_id: edge_id.into(), x, vertex: None }
    }
}

/// Split of one vertex into groups of its incident edge ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexSplit {
    pub vertex: String,
    pub groups: Vec<Vec<EdgeEnd>>,
}

/// A set of cuts: points strictly inside edges and vertex splits.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CutSet {
    pub interior: Vec<GraphPoint>,
    pub splits: Vec<VertexSplit>,
}

/// One entry of a serialized cut list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CutEntry {
    Point { edge_id: String, x: f64 },
    Split { vertex: String, groups: Vec<Vec<EdgeEnd>> },
}

impl CutSet {
    pub fn is_empty(&self) -> bool {
        self.interior.is_empty() && self.splits.is_empty()
    }

    pub fn entries(&self) -> Vec<CutEntry> {
        let mut out: Vec<CutEntry> = self
            .interior
            .iter()
            .map(|p| CutEntry::Point { edge_id: p.edge_id.clone(), x: p.x })
            .collect();
        out.extend(
            self.splits
                .iter()
                .map(|s| CutEntry::Split { vertex: s.vertex.clone(), groups: s.groups.clone() }),
        );
        out
    }

    /// Split of `vertex` separating each incident edge end into its own group.
    pub fn full_split(g: &MetricGraph, v: usize) -> VertexSplit {
        VertexSplit {
            vertex: g.vertices[v].id.clone(),
            groups: g.incident(v).iter().map(|&(e, end)| vec![g.edge_end(e, end)]).collect(),
        }
    }

    /// Resolve to sorted interior positions per edge and a group label per
    /// incident end of every split vertex. Endpoint cuts become splits
    /// `{that end} | rest`; several splits of one vertex are merged into their
    /// common refinement.
    pub fn normalize(&self, g: &MetricGraph) -> Result<NormalCut, GraphError> {
        let mut per_edge: Vec<Vec<f64>> = vec![Vec::new(); g.edge_count()];
        let mut labels: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();

        let mut push_split = |v: usize, label: Vec<usize>| labels.entry(v).or_default().push(label);

        for p in &self.interior {
            let (e, x) = g.locate(p)?;
            let edge = &g.edges[e];
            if x == 0.0 || x == edge.length {
                let end = if x == 0.0 { End::From } else { End::To };
                let v = edge.endpoint(end);
                if g.degree(v) < 2 {
                    return Err(GraphError::InvalidSplit {
                        vertex: g.vertices[v].id.clone(),
                        reason: "endpoint cut at a degree-1 vertex".into(),
                    });
                }
                let label = g.incident(v).iter().map(|&ie| usize::from(ie == (e, end))).collect();
                push_split(v, label);
            } else {
                if per_edge[e].contains(&x) {
                    return Err(GraphError::DuplicateCut { edge: p.edge_id.clone(), x });
                }
                per_edge[e].push(x);
            }
        }
        for s in &self.splits {
            let v = g.vertex_index(&s.vertex).ok_or_else(|| GraphError::UnknownVertex(s.vertex.clone()))?;
            let inc = g.incident(v);
            let mut label = vec![usize::MAX; inc.len()];
            let nonempty = s.groups.iter().filter(|gr| !gr.is_empty()).count();
            if nonempty < 2 || s.groups.iter().any(|gr| gr.is_empty()) {
                return Err(GraphError::InvalidSplit {
                    vertex: s.vertex.clone(),
                    reason: "a split needs at least two nonempty groups".into(),
                });
            }
            for (gi, group) in s.groups.iter().enumerate() {
                for ee in group {
                    let e = g.edge_index(&ee.edge_id).ok_or_else(|| GraphError::UnknownEdge(ee.edge_id.clone()))?;
                    let pos = inc.iter().position(|&ie| ie == (e, ee.end)).ok_or_else(|| {
                        GraphError::InvalidSplit {
                            vertex: s.vertex.clone(),
                            reason: format!("edge end {}:{:?} is not incident", ee.edge_id, ee.end),
                        }
                    })?;
                    if label[pos] != usize::MAX {
                        return Err(GraphError::InvalidSplit {
                            vertex: s.vertex.clone(),
                            reason: format!("edge end {}:{:?} listed twice", ee.edge_id, ee.end),
                        });
                    }
                    label[pos] = gi;
                }
            }
            if label.contains(&usize::MAX) {
                return Err(GraphError::InvalidSplit {
                    vertex: s.vertex.clone(),
                    reason: "groups do not cover every incident edge end".into(),
                });
            }
            push_split(v, label);
        }
        for cuts in &mut per_edge {
            cuts.sort_by(f64::total_cmp);
        }
        let split_groups = labels
            .into_iter()
            .map(|(v, ls)| {
                let d = ls[0].len();
                let keys: Vec<Vec<usize>> = (0..d).map(|i| ls.iter().map(|l| l[i]).collect()).collect();
                (v, canonical_groups(&keys))
            })
            .collect();
        Ok(NormalCut { per_edge, split_groups })
    }
}

/// Group index per incident end, groups numbered by first occurrence.
fn canonical_groups<K: PartialEq>(keys: &[K]) -> Vec<usize> {
    let mut reps: Vec<&K> = Vec::new();
    keys.iter()
        .map(|k| match reps.iter().position(|r| *r == k) {
            Some(i) => i,
            None => {
                reps.push(k);
                reps.len() - 1
            }
        })
        .collect()
}

/// Canonical form of a [`CutSet`] relative to a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalCut {
    /// Sorted interior cut coordinates for every edge.
    pub per_edge: Vec<Vec<f64>>,
    /// For each split vertex, the group of each incident end (in incidence order).
    pub split_groups: BTreeMap<usize, Vec<usize>>,
}

impl NormalCut {
    pub fn to_cutset(&self, g: &MetricGraph) -> CutSet {
        let mut interior = Vec::new();
        for (e, xs) in self.per_edge.iter().enumerate() {
            for &x in xs {
                interior.push(GraphPoint::new(g.edges[e].id.clone(), x));
            }
        }
        let splits = self
            .split_groups
            .iter()
            .map(|(&v, labels)| {
                let n = labels.iter().max().map_or(0, |m| m + 1);
                let mut groups = vec![Vec::new(); n];
                for (&(e, end), &l) in g.incident(v).iter().zip(labels) {
                    groups[l].push(g.edge_end(e, end));
                }
                VertexSplit { vertex: g.vertices[v].id.clone(), groups }
            })
            .collect();
        CutSet { interior, splits }
    }
}

/// Cut `g`: every interior cut splits its edge into two pieces ending at two
/// new degree-1 vertices; every vertex split replaces the vertex by one new
/// vertex per group. The result may be disconnected.
pub fn apply_cut(g: &MetricGraph, cuts: &CutSet) -> Result<MetricGraph, GraphError> {
    let normal = cuts.normalize(g)?;
    Ok(apply_normal_cut(g, &normal))
}

fn apply_normal_cut(g: &MetricGraph, cut: &NormalCut) -> MetricGraph {
    let mut vertices: Vec<Vertex> = Vec::new();
    // vertex id for each (vertex, incident end position)
    let mut end_vertex: Vec<Vec<String>> = Vec::with_capacity(g.vertex_count());
    for (v, vert) in g.vertices.iter().enumerate() {
        match cut.split_groups.get(&v) {
            Some(labels) => {
                let n = labels.iter().max().map_or(0, |m| m + 1);
                for gi in 0..n {
                    vertices.push(Vertex { id: format!("{}/{}", vert.id, gi), cut_created: true });
                }
                end_vertex.push(labels.iter().map(|gi| format!("{}/{}", vert.id, gi)).collect());
            }
            None => {
                vertices.push(vert.clone());
                end_vertex.push(vec![vert.id.clone(); g.degree(v)]);
            }
        }
    }
    let end_id = |e: usize, end: End| -> String {
        let v = g.edges[e].endpoint(end);
        let pos = g.incidence[v].iter().position(|&ie| ie == (e, end)).unwrap();
        end_vertex[v][pos].clone()
    };
    let mut raw = Vec::new();
    for (e, edge) in g.edges.iter().enumerate() {
        let xs = &cut.per_edge[e];
        if xs.is_empty() {
            raw.push(RawEdge {
                id: edge.id.clone(),
                from: end_id(e, End::From),
                to: end_id(e, End::To),
                length: edge.length,
                origin_edge: edge.origin_edge.clone(),
                origin_offset: edge.origin_offset,
            });
            continue;
        }
        for (j, _) in xs.iter().enumerate() {
            vertices.push(Vertex { id: format!("{}@{}-", edge.id, j), cut_created: true });
            vertices.push(Vertex { id: format!("{}@{}+", edge.id, j), cut_created: true });
        }
        for p in 0..=xs.len() {
            let a = if p == 0 { 0.0 } else { xs[p - 1] };
            let b = if p == xs.len() { edge.length } else { xs[p] };
            raw.push(RawEdge {
                id: format!("{}~{}", edge.id, p),
                from: if p == 0 { end_id(e, End::From) } else { format!("{}@{}+", edge.id, p - 1) },
                to: if p == xs.len() { end_id(e, End::To) } else { format!("{}@{}-", edge.id, p) },
                length: b - a,
                origin_edge: edge.origin_edge.clone(),
                origin_offset: edge.origin_offset + a,
            });
        }
    }
    MetricGraph::assemble(vertices, raw)
}

/// Clusters of a (possibly cut) graph together with their boundary points.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub clusters: Vec<MetricGraph>,
    /// Ids of the cut-created vertices of each cluster.
    pub boundary: Vec<Vec<String>>,
    pub cuts: CutSet,
}

impl Partition {
    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }
}

/// Maximal connected subgraphs of `g`, ordered by their first edge id.
pub fn components(g: &MetricGraph) -> Partition {
    let labels = g.component_labels();
    let n = labels.iter().max().map_or(0, |m| m + 1);
    let mut groups: Vec<(Vec<Vertex>, Vec<RawEdge>)> = (0..n).map(|_| (Vec::new(), Vec::new())).collect();
    for (v, vert) in g.vertices.iter().enumerate() {
        groups[labels[v]].0.push(vert.clone());
    }
    for e in &g.edges {
        groups[labels[e.from]].1.push(RawEdge {
            id: e.id.clone(),
            from: g.vertices[e.from].id.clone(),
            to: g.vertices[e.to].id.clone(),
            length: e.length,
            origin_edge: e.origin_edge.clone(),
            origin_offset: e.origin_offset,
        });
    }
    let mut clusters: Vec<MetricGraph> = groups
        .into_iter()
        .filter(|(_, es)| !es.is_empty())
        .map(|(vs, es)| MetricGraph::assemble(vs, es))
        .collect();
    clusters.sort_by(|a, b| a.edges[0].id.cmp(&b.edges[0].id));
    let boundary = clusters
        .iter()
        .map(|c| c.vertices.iter().filter(|v| v.cut_created).map(|v| v.id.clone()).collect())
        .collect();
    Partition { clusters, boundary, cuts: CutSet::default() }
}

/// Cut `g` and return the resulting clusters with the cut set as provenance.
pub fn partition(g: &MetricGraph, cuts: &CutSet) -> Result<Partition, GraphError> {
    let normal = cuts.normalize(g)?;
    let mut p = components(&apply_normal_cut(g, &normal));
    p.cuts = normal.to_cutset(g);
    Ok(p)
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(vertices: &[&str], edges: &[(&str, &str, &str, f64)]) -> GraphSpec {
        GraphSpec {
            vertices: vertices.iter().map(|s| s.to_string()).collect(),
            edges: edges
                .iter()
                .map(|&(id, from, to, length)| EdgeSpec {
                    id: id.into(),
                    from: from.into(),
                    to: to.into(),
                    length,
                })
                .collect(),
        }
    }

    fn tadpole() -> MetricGraph {
        let l = 2.0 * std::f64::consts::PI;
        build_graph(&spec(&["a", "b"], &[("loop", "a", "a", l), ("tail", "a", "b", l)])).unwrap()
    }

    fn star() -> MetricGraph {
        build_graph(&spec(
            &["c", "l1", "l2", "l3"],
            &[("e1", "c", "l1", 1.0), ("e2", "c", "l2", 1.0), ("e3", "c", "l3", 1.0)],
        ))
        .unwrap()
    }

    #[test]
    fn path_graph_builds() {
        let g = build_graph(&spec(&["a", "b"], &[("e", "a", "b", 1.0)])).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (2, 1));
        assert_eq!(g.betti_number(), 0);
        assert!(g.is_tree());
        assert_eq!(g.total_length(), 1.0);
    }

    #[test]
    fn tadpole_has_one_cycle() {
        let g = tadpole();
        assert_eq!(g.betti_number(), 1);
        assert!(!g.is_tree());
        assert!((g.total_length() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn star_is_tree() {
        assert!(star().is_tree());
        assert_eq!(star().degree(0), 3);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            build_graph(&spec(&["a", "b"], &[("e", "a", "b", 0.0)])),
            Err(GraphError::ZeroOrNegativeLength { .. })
        ));
        assert!(matches!(
            build_graph(&spec(&["a", "b"], &[("e", "a", "b", -1.0)])),
            Err(GraphError::ZeroOrNegativeLength { .. })
        ));
        assert!(matches!(
            build_graph(&spec(&["a"], &[("e", "a", "z", 1.0)])),
            Err(GraphError::DanglingEndpoint { .. })
        ));
        assert!(matches!(
            build_graph(&spec(&["a", "b", "c"], &[("e", "a", "b", 1.0)])),
            Err(GraphError::Disconnected { components: 2 })
        ));
        assert!(matches!(build_graph(&spec(&["a"], &[])), Err(GraphError::EmptyGraph)));
        assert!(matches!(
            build_graph(&spec(&["a", "a"], &[("e", "a", "a", 1.0)])),
            Err(GraphError::BadIdentifier(_))
        ));
    }

    #[test]
    fn json_round_trip() {
        let text = r#"{"vertices": ["a","b"], "edges": [{"id":"e1","from":"a","to":"b","length":1.0}]}"#;
        let g = MetricGraph::from_json(text).unwrap();
        let back = serde_json::to_string(&g.to_spec()).unwrap();
        assert_eq!(MetricGraph::from_json(&back).unwrap(), g);
        assert!(matches!(MetricGraph::from_json("{not json"), Err(GraphError::Parse(_))));
    }

    #[test]
    fn interior_cut_splits_interval() {
        let g = build_graph(&spec(&["a", "b"], &[("e", "a", "b", 1.0)])).unwrap();
        let cut = CutSet { interior: vec![GraphPoint::new("e", 0.5)], splits: vec![] };
        let h = apply_cut(&g, &cut).unwrap();
        assert_eq!(h.edge_count(), 2);
        assert_eq!(h.component_count(), 2);
        assert!(h.edges().iter().all(|e| (e.length - 0.5).abs() < 1e-15));
        assert_eq!(h.boundary_vertices().len(), 2);
    }

    #[test]
    fn loop_cut_breaks_cycle() {
        let g = tadpole();
        let cut = CutSet { interior: vec![GraphPoint::new("loop", 1.0)], splits: vec![] };
        let h = apply_cut(&g, &cut).unwrap();
        assert_eq!(h.component_count(), 1);
        assert_eq!(h.betti_number(), 0);
        assert!((h.total_length() - g.total_length()).abs() < 1e-12);
    }

    #[test]
    fn star_vertex_split() {
        let g = star();
        let split = VertexSplit {
            vertex: "c".into(),
            groups: vec![
                vec![EdgeEnd { edge_id: "e1".into(), end: End::From }],
                vec![
                    EdgeEnd { edge_id: "e2".into(), end: End::From },
                    EdgeEnd { edge_id: "e3".into(), end: End::From },
                ],
            ],
        };
        let p = partition(&g, &CutSet { interior: vec![], splits: vec![split] }).unwrap();
        assert_eq!(p.len(), 2);
        let lengths: Vec<f64> = p.clusters.iter().map(|c| c.total_length()).collect();
        assert_eq!(lengths, vec![1.0, 2.0]);
        assert_eq!(p.clusters[0].edge_count(), 1);
        assert_eq!(p.clusters[1].edge_count(), 2);
        assert_eq!(p.boundary[0].len(), 1);
        assert_eq!(p.boundary[1].len(), 1);
    }

    #[test]
    fn endpoint_cut_becomes_split() {
        let g = star();
        let cut = CutSet { interior: vec![GraphPoint::new("e1", 0.0)], splits: vec![] };
        let p = partition(&g, &cut).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.cuts.interior.is_empty());
        assert_eq!(p.cuts.splits.len(), 1);
        assert_eq!(p.cuts.splits[0].groups.len(), 2);
    }

    #[test]
    fn two_endpoint_cuts_refine() {
        let g = star();
        let cut = CutSet {
            interior: vec![GraphPoint::new("e1", 0.0), GraphPoint::new("e2", 0.0)],
            splits: vec![],
        };
        let p = partition(&g, &cut).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(p.cuts.splits[0].groups.len(), 3);
    }

    #[test]
    fn cut_errors() {
        let g = star();
        let off = CutSet { interior: vec![GraphPoint::new("e1", 1.5)], splits: vec![] };
        assert!(matches!(apply_cut(&g, &off), Err(GraphError::CutPointOffGraph { .. })));
        let unknown = CutSet { interior: vec![GraphPoint::new("zz", 0.5)], splits: vec![] };
        assert!(matches!(apply_cut(&g, &unknown), Err(GraphError::CutPointOffGraph { .. })));
        let dup = CutSet {
            interior: vec![GraphPoint::new("e1", 0.5), GraphPoint::new("e1", 0.5)],
            splits: vec![],
        };
        assert!(matches!(apply_cut(&g, &dup), Err(GraphError::DuplicateCut { .. })));
        let leaf = CutSet { interior: vec![GraphPoint::new("e1", 1.0)], splits: vec![] };
        assert!(matches!(apply_cut(&g, &leaf), Err(GraphError::InvalidSplit { .. })));
        let one_group = CutSet {
            interior: vec![],
            splits: vec![CutSet::full_split(&g, 0)].into_iter().map(|mut s| {
                let all: Vec<EdgeEnd> = s.groups.drain(..).flatten().collect();
                s.groups = vec![all];
                s
            }).collect(),
        };
        assert!(matches!(apply_cut(&g, &one_group), Err(GraphError::InvalidSplit { .. })));
    }

    #[test]
    fn tadpole_two_cuts_give_two_clusters() {
        let g = tadpole();
        let l = 2.0 * std::f64::consts::PI;
        let cut = CutSet {
            interior: vec![GraphPoint::new("loop", l / 2.0), GraphPoint::new("tail", l / 2.0)],
            splits: vec![],
        };
        let p = partition(&g, &cut).unwrap();
        assert_eq!(p.len(), 2);
        // loop piece + half tail on one side, free half tail on the other
        let mut lengths: Vec<f64> = p.clusters.iter().map(|c| c.total_length()).collect();
        lengths.sort_by(f64::total_cmp);
        assert!((lengths[0] - l / 2.0).abs() < 1e-12);
        assert!((lengths[1] - 1.5 * l).abs() < 1e-12);
        assert!(p.clusters.iter().all(|c| c.is_tree()));
    }

    #[test]
    fn origin_offsets_compose() {
        let g = build_graph(&spec(&["a", "b"], &[("e", "a", "b", 3.0)])).unwrap();
        let h = apply_cut(&g, &CutSet { interior: vec![GraphPoint::new("e", 1.0)], splits: vec![] }).unwrap();
        let piece = h.edges().iter().find(|e| e.id == "e~1").unwrap().clone();
        let h2 = apply_cut(&h, &CutSet { interior: vec![GraphPoint::new("e~1", 0.5)], splits: vec![] }).unwrap();
        let inner = h2.edges().iter().find(|e| e.id == "e~1~1").unwrap();
        assert_eq!(piece.origin_offset, 1.0);
        assert_eq!(inner.origin_edge, "e");
        assert!((inner.origin_offset - 1.5).abs() < 1e-15);
    }
}
