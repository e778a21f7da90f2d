//! Nodal and Neumann structure of eigenfunctions.
//!
//! A nodal point is a zero `x` of `f` such that `f` does not vanish
//! identically near `x`: interior zeros of edges where `f` is not identically
//! zero, plus vertices where `f = 0` and some incident edge carries a nonzero
//! restriction. For Morse functions this is the usual isolated-zero set.
//!
//! Neumann points are interior critical points of edges plus vertices of
//! degree at least two where every incident derivative vanishes.

use std::collections::HashMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::AnalysisError;
use crate::graph::{partition, CutSet, End, GraphPoint, MetricGraph, Partition};
use crate::numfmt::round_sig;
use crate::spectral::{inner, BoundaryCondition, Eigenfunction, Eigenpair, Skeleton};

/// Zero threshold relative to `max |f|`.
pub const ZERO_TOL: f64 = 1e-9;
/// Points this close (relative to the edge length) to a vertex are the vertex.
pub const SNAP_TOL: f64 = 1e-9;

fn lengths(g: &MetricGraph) -> Vec<f64> {
    g.edges().iter().map(|e| e.length).collect()
}

fn end_x(g: &MetricGraph, e: usize, end: End) -> f64 {
    match end {
        End::From => 0.0,
        End::To => g.edges()[e].length,
    }
}

fn amplitude(f: &Eigenfunction, e: usize, len: f64) -> f64 {
    let [a, b] = f.coeffs[e];
    if f.k == 0.0 {
        a.abs().max((a + b * len).abs())
    } else {
        a.hypot(b)
    }
}

/// Edges on which `f` vanishes identically.
pub fn zero_edges(g: &MetricGraph, f: &Eigenfunction) -> Vec<bool> {
    let sup = f.sup_norm(&lengths(g));
    g.edges().iter().enumerate().map(|(e, edge)| amplitude(f, e, edge.length) <= ZERO_TOL * sup).collect()
}

pub fn is_morse(g: &MetricGraph, f: &Eigenfunction) -> bool {
    !zero_edges(g, f).contains(&true)
}

fn first_zero_edge(g: &MetricGraph, f: &Eigenfunction) -> Option<String> {
    zero_edges(g, f).iter().position(|&z| z).map(|e| g.edges()[e].id.clone())
}

/// Lattice points `(phase + jπ)/k` inside `[0, len]`, widened by the snap tolerance.
fn lattice(phase: f64, k: f64, len: f64) -> Vec<f64> {
    let snap = SNAP_TOL * len;
    let mut j = ((-snap * k - phase) / PI).ceil() as i64;
    let mut out = Vec::new();
    loop {
        let x = (phase + j as f64 * PI) / k;
        if x > len + snap {
            break;
        }
        if x >= -snap {
            out.push(x.clamp(0.0, len));
        }
        j += 1;
    }
    out
}

#[derive(Debug, Clone)]
struct PointSet {
    interior: Vec<(usize, f64)>,
    vertices: Vec<usize>,
}

impl PointSet {
    fn points(&self, g: &MetricGraph) -> Vec<GraphPoint> {
        let mut pts: Vec<GraphPoint> = self
            .interior
            .iter()
            .map(|&(e, x)| GraphPoint::new(g.edges()[e].id.clone(), x))
            .collect();
        pts.extend(self.vertices.iter().map(|&v| g.vertex_point(v)));
        pts.sort_by(|a, b| a.edge_id.cmp(&b.edge_id).then(a.x.total_cmp(&b.x)));
        pts
    }

    fn count(&self) -> usize {
        self.interior.len() + self.vertices.len()
    }

    /// Cuts at every point; vertices of degree one are left alone.
    fn cutset(&self, g: &MetricGraph) -> CutSet {
        CutSet {
            interior: self.interior.iter().map(|&(e, x)| GraphPoint::new(g.edges()[e].id.clone(), x)).collect(),
            splits: self
                .vertices
                .iter()
                .filter(|&&v| g.degree(v) >= 2)
                .map(|&v| CutSet::full_split(g, v))
                .collect(),
        }
    }
}

fn zero_set(g: &MetricGraph, f: &Eigenfunction) -> PointSet {
    let sup = f.sup_norm(&lengths(g));
    let zero = zero_edges(g, f);
    let mut vertex_zero = vec![false; g.vertex_count()];
    let mut interior = Vec::new();
    for (e, edge) in g.edges().iter().enumerate() {
        if zero[e] {
            continue;
        }
        let len = edge.length;
        let [a, b] = f.coeffs[e];
        let xs = if f.k == 0.0 {
            if b != 0.0 {
                let x = -a / b;
                if (-SNAP_TOL * len..=len * (1.0 + SNAP_TOL)).contains(&x) {
                    vec![x.clamp(0.0, len)]
                } else {
                    vec![]
                }
            } else {
                vec![]
            }
        } else {
            lattice(b.atan2(a) + PI / 2.0, f.k, len)
        };
        for x in xs {
            if x <= SNAP_TOL * len {
                vertex_zero[edge.from] = true;
            } else if x >= len * (1.0 - SNAP_TOL) {
                vertex_zero[edge.to] = true;
            } else {
                interior.push((e, x));
            }
        }
    }
    for (v, vz) in vertex_zero.iter_mut().enumerate() {
        let inc = g.incident(v);
        if !inc.iter().any(|&(e, _)| !zero[e]) {
            *vz = false;
            continue;
        }
        let (e, end) = inc[0];
        if f.eval(e, end_x(g, e, end)).0.abs() < ZERO_TOL * sup {
            *vz = true;
        }
    }
    // A lattice zero just outside the snap window of a zero vertex is that vertex.
    interior.retain(|&(e, x)| {
        let edge = &g.edges()[e];
        let near = 1e-7 * edge.length;
        !((x < near && vertex_zero[edge.from]) || (x > edge.length - near && vertex_zero[edge.to]))
    });
    let vertices = (0..g.vertex_count()).filter(|&v| vertex_zero[v]).collect();
    PointSet { interior, vertices }
}

/// Nodal points of any nonzero eigenfunction, Morse or not.
pub fn nodal_points_general(g: &MetricGraph, f: &Eigenfunction) -> Vec<GraphPoint> {
    zero_set(g, f).points(g)
}

/// Node count `φ(f)`.
pub fn node_count(g: &MetricGraph, f: &Eigenfunction) -> usize {
    zero_set(g, f).count()
}

/// Nodal points of a Morse eigenfunction.
pub fn nodal_points(g: &MetricGraph, f: &Eigenfunction) -> Result<Vec<GraphPoint>, AnalysisError> {
    if let Some(e) = first_zero_edge(g, f) {
        return Err(AnalysisError::NotMorse(e));
    }
    Ok(nodal_points_general(g, f))
}

/// Nodal domains: components after cutting at every nodal point.
pub fn nodal_domains(g: &MetricGraph, f: &Eigenfunction) -> Result<Partition, AnalysisError> {
    if let Some(e) = first_zero_edge(g, f) {
        return Err(AnalysisError::NotMorse(e));
    }
    Ok(partition(g, &zero_set(g, f).cutset(g))?)
}

fn is_constant(g: &MetricGraph, f: &Eigenfunction) -> bool {
    f.k == 0.0 && f.coeffs.iter().zip(g.edges()).all(|(c, e)| (c[1] * e.length).abs() <= ZERO_TOL * c[0].abs())
}

fn critical_set(g: &MetricGraph, f: &Eigenfunction) -> PointSet {
    let sup = f.sup_norm(&lengths(g));
    let scale = if f.k > 0.0 { f.k } else { 1.0 };
    let mut interior = Vec::new();
    if f.k > 0.0 {
        for (e, edge) in g.edges().iter().enumerate() {
            let [a, b] = f.coeffs[e];
            let len = edge.length;
            for x in lattice(b.atan2(a), f.k, len) {
                if x > SNAP_TOL * len && x < len * (1.0 - SNAP_TOL) {
                    interior.push((e, x));
                }
            }
        }
    }
    let vertices = (0..g.vertex_count())
        .filter(|&v| {
            g.degree(v) >= 2
                && g.incident(v)
                    .iter()
                    .all(|&(e, end)| f.eval(e, end_x(g, e, end)).1.abs() < ZERO_TOL * scale * sup)
        })
        .collect();
    PointSet { interior, vertices }
}

/// Neumann points of a nonconstant Morse eigenfunction.
pub fn neumann_points(g: &MetricGraph, f: &Eigenfunction) -> Result<Vec<GraphPoint>, AnalysisError> {
    if let Some(e) = first_zero_edge(g, f) {
        return Err(AnalysisError::NotMorse(e));
    }
    if is_constant(g, f) {
        return Err(AnalysisError::Constant);
    }
    Ok(critical_set(g, f).points(g))
}

/// Neumann domains: components after cutting at every Neumann point.
pub fn neumann_domains(g: &MetricGraph, f: &Eigenfunction) -> Result<Partition, AnalysisError> {
    if let Some(e) = first_zero_edge(g, f) {
        return Err(AnalysisError::NotMorse(e));
    }
    if is_constant(g, f) {
        return Err(AnalysisError::Constant);
    }
    Ok(partition(g, &critical_set(g, f).cutset(g))?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub is_morse: bool,
    pub is_generic: bool,
    pub reasons: Vec<String>,
}

/// Morse and genericity flags of one eigenfunction whose eigenvalue has the
/// given multiplicity.
pub fn classify_function(g: &MetricGraph, f: &Eigenfunction, multiplicity: usize) -> Classification {
    let mut reasons = Vec::new();
    let zero = zero_edges(g, f);
    for (e, &z) in zero.iter().enumerate() {
        if z {
            reasons.push(format!("vanishes identically on edge {}", g.edges()[e].id));
        }
    }
    let is_morse = reasons.is_empty();
    if multiplicity != 1 {
        reasons.push(format!("eigenvalue has multiplicity {multiplicity}"));
    }
    let sup = f.sup_norm(&lengths(g));
    for v in 0..g.vertex_count() {
        let (e, end) = g.incident(v)[0];
        if f.eval(e, end_x(g, e, end)).0.abs() < ZERO_TOL * sup {
            reasons.push(format!("vanishes at vertex {}", g.vertices()[v].id));
        }
    }
    for v in critical_set(g, f).vertices {
        reasons.push(format!("extremal at interior vertex {}", g.vertices()[v].id));
    }
    Classification { is_morse, is_generic: reasons.is_empty(), reasons }
}

/// Flags for basis vector `basis_index` of an eigenpair.
pub fn classify(g: &MetricGraph, pair: &Eigenpair, basis_index: usize) -> Classification {
    classify_function(g, &pair.basis[basis_index], pair.multiplicity)
}

/// Null space of a `2 x m` block, as unit vectors (at most `m` of them).
fn block_null_space(rows: [&[f64]; 2], m: usize) -> Vec<Vec<f64>> {
    let mut a = crate::linalg::Matrix::zeros(m.max(2), m);
    for (r, row) in rows.iter().enumerate() {
        for j in 0..m {
            a[(r, j)] = row[j];
        }
    }
    let Ok(s) = crate::linalg::svd(&a) else { return vec![] };
    let scale = rows.iter().flat_map(|r| r.iter()).fold(0.0f64, |x, y| x.max(y.abs())).max(1e-300);
    (0..m)
        .filter(|&i| s.s[m - 1 - i] <= 1e-9 * scale.max(s.s[0]))
        .map(|i| s.null_vector(i))
        .collect()
}

/// Deterministic representatives of a (possibly degenerate) eigenspace.
///
/// Functions vanishing on an edge come first (edges in sorted order), then
/// the orthogonal complement. If the last representative is not Morse it is
/// replaced by [`morse_representative`] when one exists.
pub fn representatives(g: &MetricGraph, pair: &Eigenpair) -> Vec<Eigenfunction> {
    let m = pair.multiplicity;
    let basis = &pair.basis;
    if m == 1 {
        return basis.clone();
    }
    let mut chosen: Vec<Vec<f64>> = Vec::new();
    let orthogonalize = |v: &mut Vec<f64>, against: &[Vec<f64>]| {
        for _ in 0..2 {
            for q in against {
                let p: f64 = v.iter().zip(q).map(|(a, b)| a * b).sum();
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= p * y;
                }
            }
        }
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-8 {
            v.iter_mut().for_each(|x| *x /= n);
            true
        } else {
            false
        }
    };
    'edges: for e in 0..g.edge_count() {
        let ra: Vec<f64> = basis.iter().map(|f| f.coeffs[e][0]).collect();
        let rb: Vec<f64> = basis.iter().map(|f| f.coeffs[e][1]).collect();
        for mut v in block_null_space([&ra, &rb], m) {
            if chosen.len() + 1 >= m {
                break 'edges;
            }
            if orthogonalize(&mut v, &chosen) {
                chosen.push(v);
            }
        }
    }
    for i in 0..m {
        if chosen.len() == m {
            break;
        }
        let mut v = vec![0.0; m];
        v[i] = 1.0;
        if orthogonalize(&mut v, &chosen) {
            chosen.push(v);
        }
    }
    let mut reps: Vec<Eigenfunction> = chosen
        .iter()
        .map(|c| {
            let mut f = Eigenfunction::combine(basis, c);
            f.fix_sign();
            f
        })
        .collect();
    if let Some(last) = reps.last() {
        if !is_morse(g, last) {
            if let Some(f) = morse_representative(g, basis) {
                *reps.last_mut().unwrap() = f;
            }
        }
    }
    reps
}

/// A fully supported member of the span of `fs`, searched over a 360-point
/// angle grid in the plane of the last two basis vectors. The grid angle with
/// the largest minimum edge amplitude wins.
pub fn morse_representative(g: &MetricGraph, fs: &[Eigenfunction]) -> Option<Eigenfunction> {
    if fs.len() == 1 {
        return is_morse(g, &fs[0]).then(|| fs[0].clone());
    }
    let m = fs.len();
    let ls = lengths(g);
    let mut best: Option<(f64, Eigenfunction)> = None;
    for j in 0..360 {
        let theta = (j as f64 + 0.5) * PI / 360.0;
        let mut w = vec![0.0; m];
        w[m - 2] = theta.cos();
        w[m - 1] = theta.sin();
        let f = Eigenfunction::combine(fs, &w);
        let sup = f.sup_norm(&ls);
        let min_amp = (0..g.edge_count()).map(|e| amplitude(&f, e, ls[e])).fold(f64::INFINITY, f64::min) / sup;
        if min_amp > ZERO_TOL && best.as_ref().is_none_or(|b| min_amp > b.0) {
            best = Some((min_amp, f));
        }
    }
    best.map(|(_, mut f)| {
        let n = inner(&ls, &f, &f).sqrt();
        f.scale(1.0 / n);
        f.fix_sign();
        f
    })
}

/// Representative for the `n`-th eigenvalue (1-based, with multiplicity).
pub fn representative(g: &MetricGraph, pairs: &[Eigenpair], n: usize) -> Option<Eigenfunction> {
    let (grp, i) = crate::spectral::locate_index(pairs, n)?;
    representatives(g, &pairs[grp]).into_iter().nth(i)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointOut {
    pub edge_id: String,
    pub x: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub vertex: Option<String>,
}

impl From<&GraphPoint> for PointOut {
    fn from(p: &GraphPoint) -> Self {
        PointOut { edge_id: p.edge_id.clone(), x: round_sig(p.x), vertex: p.vertex.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterSummary {
    pub edges: Vec<String>,
    pub length: f64,
    pub mu2: f64,
}

/// μ₂ of each cluster with standard conditions.
pub fn cluster_summaries(p: &Partition) -> Result<Vec<ClusterSummary>, AnalysisError> {
    p.clusters
        .iter()
        .map(|c| {
            let k = Skeleton::from_graph(c, &BoundaryCondition::Standard)?.nth_k(2)?;
            Ok(ClusterSummary {
                edges: c.edges().iter().map(|e| e.id.clone()).collect(),
                length: round_sig(c.total_length()),
                mu2: round_sig(k * k),
            })
        })
        .collect()
}

/// Everything known about the nodal and Neumann structure of one eigenfunction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DomainReport {
    pub k: f64,
    pub mu: f64,
    pub multiplicity: usize,
    pub is_morse: bool,
    pub is_generic: bool,
    pub reasons: Vec<String>,
    pub nodal_points: Vec<PointOut>,
    pub node_count: usize,
    pub nodal_domain_count: Option<usize>,
    pub nodal_domains: Vec<ClusterSummary>,
    /// False for constant and non-Morse functions.
    pub neumann_applicable: bool,
    pub neumann_points: Vec<PointOut>,
    pub neumann_domain_count: Option<usize>,
    pub neumann_domains: Vec<ClusterSummary>,
    pub notes: Vec<String>,
}

pub fn domain_report(g: &MetricGraph, f: &Eigenfunction, multiplicity: usize) -> Result<DomainReport, AnalysisError> {
    let class = classify_function(g, f, multiplicity);
    let zeros = zero_set(g, f);
    let mut notes = vec!["degree-2 vertices with vanishing derivatives count as Neumann points".to_string()];
    let (nodal_domain_count, nodal_domains) = if class.is_morse {
        let p = partition(g, &zeros.cutset(g))?;
        (Some(p.len()), cluster_summaries(&p)?)
    } else {
        notes.push("not Morse: nodal domains undefined".into());
        (None, vec![])
    };
    let (neumann_applicable, neumann_points, neumann_domain_count, neumann_domains) =
        match neumann_domains(g, f) {
            Ok(p) => {
                let pts = critical_set(g, f).points(g).iter().map(PointOut::from).collect();
                (true, pts, Some(p.len()), cluster_summaries(&p)?)
            }
            Err(AnalysisError::Constant) => {
                notes.push("constant eigenfunction: every point is extremal".into());
                (false, vec![], None, vec![])
            }
            Err(AnalysisError::NotMorse(_)) => (false, vec![], None, vec![]),
            Err(e) => return Err(e),
        };
    Ok(DomainReport {
        k: round_sig(f.k),
        mu: round_sig(f.k * f.k),
        multiplicity,
        is_morse: class.is_morse,
        is_generic: class.is_generic,
        reasons: class.reasons,
        nodal_points: zeros.points(g).iter().map(PointOut::from).collect(),
        node_count: zeros.count(),
        nodal_domain_count,
        nodal_domains,
        neumann_applicable,
        neumann_points,
        neumann_domain_count,
        neumann_domains,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum ParentPoint {
    Vertex(usize),
    Interior(usize, u64),
}

fn parent_point(parent: &MetricGraph, cluster: &MetricGraph, v: usize) -> Result<ParentPoint, AnalysisError> {
    let (e, end) = cluster.incident(v)[0];
    let piece = &cluster.edges()[e];
    let pe = parent
        .edge_index(&piece.origin_edge)
        .ok_or_else(|| AnalysisError::BadInterface(format!("edge {} not in parent", piece.origin_edge)))?;
    let x = piece.origin_offset + if end == End::To { piece.length } else { 0.0 };
    let len = parent.edges()[pe].length;
    Ok(if x <= 1e-12 * len {
        ParentPoint::Vertex(parent.edges()[pe].from)
    } else if x >= len * (1.0 - 1e-12) {
        ParentPoint::Vertex(parent.edges()[pe].to)
    } else {
        ParentPoint::Interior(pe, x.to_bits())
    })
}

fn parent_end_value(c: &MetricGraph, f: &Eigenfunction, v: usize) -> f64 {
    let (e, end) = c.incident(v)[0];
    f.eval(e, end_x(c, e, end)).0
}

/// Glue per-cluster eigenfunctions of a common eigenvalue `μ` into an
/// eigenfunction of the parent tree by matching values at shared boundary
/// points. The result is L²-normalized.
pub fn glue_equipartition(
    parent: &MetricGraph,
    part: &Partition,
    minimizers: &[Eigenfunction],
    mu: f64,
) -> Result<Eigenfunction, AnalysisError> {
    let k = mu.sqrt();
    if minimizers.len() != part.len() {
        return Err(AnalysisError::BadInterface("one minimizer per cluster required".into()));
    }
    for (i, f) in minimizers.iter().enumerate() {
        let rel = (f.k * f.k - mu).abs() / mu.max(f64::MIN_POSITIVE);
        if rel > 1e-8 {
            return Err(AnalysisError::NotEquipartition(format!("cluster {i} has μ = {} but expected {mu}", f.k * f.k)));
        }
    }
    for (i, (c, f)) in part.clusters.iter().zip(minimizers).enumerate() {
        let sk = Skeleton::from_graph(c, &BoundaryCondition::Standard)?;
        let h = 1e-7 * f.k;
        let mult = sk.count_near(f.k + h, h * 0.01).0 - sk.count_near(f.k - h, h * 0.01).0;
        let class = classify_function(c, f, mult);
        if !class.is_generic {
            return Err(AnalysisError::NotGenericMinimizer { cluster: i, reason: class.reasons.join("; ") });
        }
    }

    let mut at: HashMap<ParentPoint, Vec<(usize, usize)>> = HashMap::new();
    for (ci, c) in part.clusters.iter().enumerate() {
        for v in c.boundary_vertices() {
            at.entry(parent_point(parent, c, v)?).or_default().push((ci, v));
        }
    }
    let mut keys: Vec<ParentPoint> = at.keys().copied().collect();
    keys.sort_by_key(|k| match *k {
        ParentPoint::Vertex(v) => (0, v, 0),
        ParentPoint::Interior(e, x) => (1, e, x),
    });

    let n = part.len();
    let mut scale: Vec<Option<f64>> = vec![None; n];
    scale[0] = Some(1.0);
    let mut queue = std::collections::VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let si = scale[i].unwrap();
        for key in &keys {
            let members = &at[key];
            let Some(&(_, vi)) = members.iter().find(|m| m.0 == i) else { continue };
            let value_i = si * parent_end_value(&part.clusters[i], &minimizers[i], vi);
            for &(j, vj) in members {
                if j == i {
                    continue;
                }
                let c = &part.clusters[j];
                let fj = &minimizers[j];
                let value_j = parent_end_value(c, fj, vj);
                let sup = fj.sup_norm(&lengths(c));
                if value_j.abs() < ZERO_TOL * sup {
                    return Err(AnalysisError::ZeroAtInterface(c.vertices()[vj].id.clone()));
                }
                let cij = value_i / value_j;
                match scale[j] {
                    None => {
                        scale[j] = Some(cij);
                        queue.push_back(j);
                    }
                    Some(s) if (s - cij).abs() > 1e-8 * s.abs() => {
                        return Err(AnalysisError::BadInterface(format!(
                            "inconsistent scaling at {}",
                            c.vertices()[vj].id
                        )));
                    }
                    Some(_) => {}
                }
            }
        }
    }
    if scale.iter().any(Option::is_none) {
        return Err(AnalysisError::BadInterface("clusters are not connected through boundary points".into()));
    }

    let mut coeffs = vec![[0.0; 2]; parent.edge_count()];
    let mut best_len = vec![0.0; parent.edge_count()];
    for (ci, c) in part.clusters.iter().enumerate() {
        let s = scale[ci].unwrap();
        for (e, piece) in c.edges().iter().enumerate() {
            let pe = parent.edge_index(&piece.origin_edge).unwrap();
            if piece.length <= best_len[pe] {
                continue;
            }
            best_len[pe] = piece.length;
            let [a, b] = minimizers[ci].coeffs[e];
            let (so, co) = (k * piece.origin_offset).sin_cos();
            coeffs[pe] = [s * (a * co - b * so), s * (a * so + b * co)];
        }
    }
    let mut f = Eigenfunction { k, coeffs };
    let ls = lengths(parent);
    let norm = inner(&ls, &f, &f).sqrt();
    f.scale(1.0 / norm);
    f.fix_sign();
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eigenvalues;
    use crate::zoo;

    #[test]
    fn interval_cosine_zeros_and_extrema() {
        let g = zoo::path(1.0).unwrap();
        let f = Eigenfunction { k: 5.0 * PI, coeffs: vec![[1.0, 0.0]] };
        assert_eq!(nodal_points(&g, &f).unwrap().len(), 5);
        assert_eq!(nodal_domains(&g, &f).unwrap().len(), 6);
        let np = neumann_points(&g, &f).unwrap();
        assert_eq!(np.len(), 4);
        for (j, p) in np.iter().enumerate() {
            assert!((p.x - (j + 1) as f64 / 5.0).abs() < 1e-12);
        }
        assert_eq!(neumann_domains(&g, &f).unwrap().len(), 5);
    }

    #[test]
    fn constant_function() {
        let g = zoo::path(2.0).unwrap();
        let f = Eigenfunction { k: 0.0, coeffs: vec![[0.7, 0.0]] };
        assert_eq!(node_count(&g, &f), 0);
        assert_eq!(nodal_domains(&g, &f).unwrap().len(), 1);
        assert_eq!(neumann_points(&g, &f), Err(AnalysisError::Constant));
        let r = domain_report(&g, &f, 1).unwrap();
        assert!(!r.neumann_applicable);
    }

    #[test]
    fn tadpole_loop_function_not_morse() {
        let g = zoo::standard_tadpole();
        let l = g.edge_index("loop").unwrap();
        let mut coeffs = vec![[0.0, 0.0]; 2];
        coeffs[l] = [0.0, 1.0];
        let u = Eigenfunction { k: 1.0, coeffs };
        assert!(!is_morse(&g, &u));
        assert!(matches!(nodal_points(&g, &u), Err(AnalysisError::NotMorse(_))));
        // vertex a and the loop midpoint
        assert_eq!(node_count(&g, &u), 2);
    }

    #[test]
    fn star_second_eigenvalue_not_generic() {
        let g = zoo::star3([1.0, 1.0, 1.0]).unwrap();
        let pairs = eigenvalues(&g, &BoundaryCondition::Standard, 3).unwrap();
        let c = classify(&g, &pairs[1], 0);
        assert!(!c.is_generic);
        assert!(c.reasons.iter().any(|r| r.contains("multiplicity 2")));
    }

    #[test]
    fn glue_path_into_cosine() {
        let g = zoo::path(1.0).unwrap();
        let k = 3;
        let cuts = CutSet {
            interior: (1..k).map(|j| GraphPoint::new("e", j as f64 / k as f64)).collect(),
            splits: vec![],
        };
        let p = partition(&g, &cuts).unwrap();
        let kk = k as f64 * PI;
        let minimizers: Vec<Eigenfunction> =
            p.clusters.iter().map(|_| Eigenfunction { k: kk, coeffs: vec![[1.0, 0.0]] }).collect();
        let f = glue_equipartition(&g, &p, &minimizers, kk * kk).unwrap();
        for i in 0..=20 {
            let x = i as f64 / 20.0;
            let want = 2f64.sqrt() * (kk * x).cos();
            assert!((f.eval(0, x).0.abs() - want.abs()).abs() < 1e-9);
        }
        assert_eq!(nodal_points(&g, &f).unwrap().len(), k);
        let sk = Skeleton::from_graph(&g, &BoundaryCondition::Standard).unwrap();
        assert!(sk.vertex_residual(&f) < 1e-8);
    }

    #[test]
    fn glue_rejects_mismatch() {
        let g = zoo::path(1.0).unwrap();
        let p = partition(&g, &CutSet { interior: vec![GraphPoint::new("e", 0.5)], splits: vec![] }).unwrap();
        let f1 = Eigenfunction { k: 2.0 * PI, coeffs: vec![[1.0, 0.0]] };
        let f2 = Eigenfunction { k: 2.0 * PI * 1.01, coeffs: vec![[1.0, 0.0]] };
        let mu = f1.k * f1.k;
        assert!(matches!(glue_equipartition(&g, &p, &[f1, f2], mu), Err(AnalysisError::NotEquipartition(_))));
    }
}
