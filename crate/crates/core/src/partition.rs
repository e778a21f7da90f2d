//! Partition energies and spectral minimal partitions.
//!
//! `Λ^N(P) = max_i μ₂(G_i)` with standard conditions on every cluster and
//! `Λ^D(P) = max_i λ₁(G_i, ∂G_i)` with Dirichlet conditions on the points
//! created by the cut. Minimal energies over exhaustive `k`-partitions are
//! found by enumerating combinatorial cut classes and minimizing over the cut
//! positions of each class with a compass search.
//!
//! A class fixes the number of interior cuts on every edge and a set
//! partition of the edge ends at every split vertex. Its weight is the number
//! of interior cuts plus `groups - 1` per split vertex. A class is admissible
//! when the cut graph consists of exactly `k` trees; this forces the weight to
//! be `k - 1 + β`.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::PartitionError;
use crate::graph::{partition, CutSet, End, GraphPoint, MetricGraph, Partition, UnionFind, VertexSplit};
use crate::numfmt::round_sig;
use crate::spectral::{BoundaryCondition, Skeleton};
use crate::zoo::Lcg;

/// Maximum number of combinatorial classes examined.
pub const CLASS_BUDGET: usize = 100_000;
/// Relative spread below which cluster values count as equal.
pub const EQUI_TOL: f64 = 1e-6;
const MAX_SWEEPS: usize = 5_000;
const MAX_CREEP: usize = 20;
const COARSE_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EnergyKind {
    Neumann,
    Dirichlet,
}

impl EnergyKind {
    fn index(self) -> usize {
        match self {
            EnergyKind::Neumann => 2,
            EnergyKind::Dirichlet => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionEnergy {
    pub kind: EnergyKind,
    /// `μ₂` (Neumann) or `λ₁` (Dirichlet) of each cluster.
    pub values: Vec<f64>,
    pub energy: f64,
    pub equipartition: bool,
}

impl PartitionEnergy {
    fn from_values(kind: EnergyKind, values: Vec<f64>) -> Self {
        let energy = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let equipartition = energy - lo <= EQUI_TOL * energy.abs();
        PartitionEnergy { kind, values, energy, equipartition }
    }
}

/// `Λ^N`: the largest `μ₂` over the clusters.
pub fn lambda_n(p: &Partition) -> Result<PartitionEnergy, PartitionError> {
    let values = p
        .clusters
        .iter()
        .map(|c| {
            let k = Skeleton::from_graph(c, &BoundaryCondition::Standard)?.nth_k(2)?;
            Ok(k * k)
        })
        .collect::<Result<Vec<f64>, PartitionError>>()?;
    Ok(PartitionEnergy::from_values(EnergyKind::Neumann, values))
}

/// `Λ^D`: the largest `λ₁` over the clusters, Dirichlet at cut-created points.
pub fn lambda_d(p: &Partition) -> Result<PartitionEnergy, PartitionError> {
    let values = p
        .clusters
        .iter()
        .enumerate()
        .map(|(i, c)| {
            if c.boundary_vertices().is_empty() {
                return Err(PartitionError::EmptyBoundary(i));
            }
            let k = Skeleton::from_graph(c, &BoundaryCondition::CutBoundary)?.nth_k(1)?;
            Ok(k * k)
        })
        .collect::<Result<Vec<f64>, PartitionError>>()?;
    Ok(PartitionEnergy::from_values(EnergyKind::Dirichlet, values))
}

pub fn energy(p: &Partition, kind: EnergyKind) -> Result<PartitionEnergy, PartitionError> {
    match kind {
        EnergyKind::Neumann => lambda_n(p),
        EnergyKind::Dirichlet => lambda_d(p),
    }
}

/// All set partitions of `n` items into at least two groups, as
/// restricted-growth label vectors.
fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, n: usize, cur: &mut Vec<usize>, max: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            if max >= 2 {
                out.push(cur.clone());
            }
            return;
        }
        for l in 0..=max {
            cur.push(l);
            rec(i + 1, n, cur, max.max(l + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n >= 2 {
        let mut cur = vec![0];
        rec(1, n, &mut cur, 1, &mut out);
    }
    out
}

/// One combinatorial class of cuts.
#[derive(Debug, Clone, PartialEq)]
pub struct CutClass {
    /// Interior cut count per edge.
    pub counts: Vec<usize>,
    /// Group label per incident end, for split vertices.
    pub splits: Vec<(usize, Vec<usize>)>,
}

impl CutClass {
    pub fn signature(&self, g: &MetricGraph) -> String {
        let mut parts: Vec<String> = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(e, c)| format!("{}x{}", g.edges()[e].id, c))
            .collect();
        for (v, labels) in &self.splits {
            let groups = labels.iter().max().map_or(0, |m| m + 1);
            let mut desc = vec![Vec::new(); groups];
            for (&(e, end), &l) in g.incident(*v).iter().zip(labels) {
                desc[l].push(format!("{}:{}", g.edges()[e].id, if end == End::From { "from" } else { "to" }));
            }
            let inner: Vec<String> = desc.iter().map(|d| d.join(",")).collect();
            parts.push(format!("{}[{}]", g.vertices()[*v].id, inner.join("|")));
        }
        if parts.is_empty() {
            "none".into()
        } else {
            parts.join(" ")
        }
    }
}

/// Every class of total weight `weight`, before admissibility filtering.
fn enumerate_classes(g: &MetricGraph, weight: usize, budget: usize) -> Result<Vec<CutClass>, PartitionError> {
    let options: Vec<(usize, Vec<Vec<usize>>)> = (0..g.vertex_count())
        .filter(|&v| g.degree(v) >= 2)
        .map(|v| (v, set_partitions(g.degree(v))))
        .collect();
    if options.iter().any(|(v, _)| g.degree(*v) >= 4) {
        log::info!("graph has a vertex of degree >= 4; all set-partition splits are enumerated");
    }
    let m = g.edge_count();
    let mut out = Vec::new();

    fn compositions(total: usize, parts: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if parts == 1 {
            cur.push(total);
            let ok = f(cur);
            cur.pop();
            return ok;
        }
        for first in 0..=total {
            cur.push(first);
            let ok = compositions(total - first, parts - 1, cur, f);
            cur.pop();
            if !ok {
                return false;
            }
        }
        true
    }

    #[allow(clippy::too_many_arguments)]
    fn rec(
        i: usize,
        left: usize,
        options: &[(usize, Vec<Vec<usize>>)],
        chosen: &mut Vec<(usize, Vec<usize>)>,
        m: usize,
        out: &mut Vec<CutClass>,
        budget: usize,
    ) -> bool {
        if i == options.len() {
            let mut cur = Vec::new();
            return compositions(left, m, &mut cur, &mut |c: &[usize]| {
                out.push(CutClass { counts: c.to_vec(), splits: chosen.clone() });
                out.len() <= budget
            });
        }
        if !rec(i + 1, left, options, chosen, m, out, budget) {
            return false;
        }
        let (v, parts) = &options[i];
        for labels in parts {
            let w = labels.iter().max().unwrap();
            if *w > left {
                continue;
            }
            chosen.push((*v, labels.clone()));
            let ok = rec(i + 1, left - w, options, chosen, m, out, budget);
            chosen.pop();
            if !ok {
                return false;
            }
        }
        true
    }

    let mut chosen = Vec::new();
    if !rec(0, weight, &options, &mut chosen, m, &mut out, budget) {
        return Err(PartitionError::BudgetExceeded { classes: out.len(), budget });
    }
    Ok(out)
}

#[derive(Debug, Clone)]
struct ClusterTemplate {
    pieces: Vec<usize>,
    skeleton: Skeleton,
}

/// A class with its cut graph laid out by index; only lengths vary.
#[derive(Debug, Clone)]
struct Template {
    class: CutClass,
    /// `(edge, first variable index)` for every cut edge.
    var_edge: Vec<usize>,
    /// Per piece: `(edge, left cut index or None for 0, right cut or None for ℓ)`.
    piece_bounds: Vec<(usize, Option<usize>, Option<usize>)>,
    clusters: Vec<ClusterTemplate>,
}

impl Template {
    fn build(g: &MetricGraph, class: &CutClass, k: usize, kind: EnergyKind) -> Option<Template> {
        // vertex slots: originals (or split groups), then cut vertices
        let mut end_vertex: Vec<Vec<usize>> = Vec::with_capacity(g.vertex_count());
        let mut n_vertices = 0;
        let mut cut_created: Vec<bool> = Vec::new();
        for v in 0..g.vertex_count() {
            if let Some((_, labels)) = class.splits.iter().find(|(sv, _)| *sv == v) {
                let groups = labels.iter().max().unwrap() + 1;
                end_vertex.push(labels.iter().map(|l| n_vertices + l).collect());
                n_vertices += groups;
                cut_created.extend(std::iter::repeat_n(true, groups));
            } else {
                end_vertex.push(vec![n_vertices; g.degree(v)]);
                n_vertices += 1;
                cut_created.push(false);
            }
        }
        let slot = |e: usize, end: End| -> usize {
            let edge = &g.edges()[e];
            let v = edge.endpoint(end);
            let pos = g.incident(v).iter().position(|&ie| ie == (e, end)).unwrap();
            end_vertex[v][pos]
        };
        let mut var_edge = Vec::new();
        let mut piece_bounds = Vec::new();
        let mut piece_ends: Vec<[usize; 2]> = Vec::new();
        for (e, &c) in class.counts.iter().enumerate() {
            let first_var = var_edge.len();
            var_edge.extend(std::iter::repeat_n(e, c));
            let mut prev = slot(e, End::From);
            let mut prev_var = None;
            for j in 0..c {
                let minus = n_vertices;
                let plus = n_vertices + 1;
                n_vertices += 2;
                cut_created.extend([true, true]);
                piece_bounds.push((e, prev_var, Some(first_var + j)));
                piece_ends.push([prev, minus]);
                prev = plus;
                prev_var = Some(first_var + j);
            }
            piece_bounds.push((e, prev_var, None));
            piece_ends.push([prev, slot(e, End::To)]);
        }
        let mut uf = UnionFind::new(n_vertices);
        for &[a, b] in &piece_ends {
            uf.union(a, b);
        }
        let mut roots: Vec<usize> = Vec::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        for (p, &[a, _]) in piece_ends.iter().enumerate() {
            let r = uf.find(a);
            match roots.iter().position(|&x| x == r) {
                Some(i) => members[i].push(p),
                None => {
                    roots.push(r);
                    members.push(vec![p]);
                }
            }
        }
        if members.len() != k {
            return None;
        }
        let mut clusters = Vec::with_capacity(k);
        for pieces in members {
            let mut local: HashMap<usize, usize> = HashMap::new();
            let mut ends = Vec::with_capacity(pieces.len());
            for &p in &pieces {
                let [a, b] = piece_ends[p];
                let n = local.len();
                let la = *local.entry(a).or_insert(n);
                let n = local.len();
                let lb = *local.entry(b).or_insert(n);
                ends.push([la, lb]);
            }
            if pieces.len() + 1 != local.len() {
                return None;
            }
            let mut dirichlet = vec![false; local.len()];
            for (&global, &l) in &local {
                dirichlet[l] = kind == EnergyKind::Dirichlet && cut_created[global];
            }
            let skeleton = Skeleton::new(local.len(), ends, vec![1.0; pieces.len()], dirichlet);
            clusters.push(ClusterTemplate { pieces, skeleton });
        }
        Some(Template { class: class.clone(), var_edge, piece_bounds, clusters })
    }

    fn dim(&self) -> usize {
        self.var_edge.len()
    }

    fn piece_lengths(&self, g: &MetricGraph, x: &[f64]) -> Option<Vec<f64>> {
        let mut out = Vec::with_capacity(self.piece_bounds.len());
        for &(e, lo, hi) in &self.piece_bounds {
            let len = g.edges()[e].length;
            let a = lo.map_or(0.0, |i| x[i]);
            let b = hi.map_or(len, |i| x[i]);
            let d = b - a;
            if d.is_nan() || d <= 1e-9 * len {
                return None;
            }
            out.push(d);
        }
        Some(out)
    }

    fn cutset(&self, g: &MetricGraph, x: &[f64]) -> CutSet {
        CutSet {
            interior: self.var_edge.iter().zip(x).map(|(&e, &t)| GraphPoint::new(g.edges()[e].id.clone(), t)).collect(),
            splits: self
                .class
                .splits
                .iter()
                .map(|(v, labels)| {
                    let groups = labels.iter().max().unwrap() + 1;
                    let mut gs = vec![Vec::new(); groups];
                    for (&(e, end), &l) in g.incident(*v).iter().zip(labels) {
                        gs[l].push(g.edge_end(e, end));
                    }
                    VertexSplit { vertex: g.vertices()[*v].id.clone(), groups: gs }
                })
                .collect(),
        }
    }
}

type CacheKey = (usize, Vec<u64>);

struct Evaluator<'a> {
    g: &'a MetricGraph,
    t: Template,
    kind: EnergyKind,
    cache: HashMap<CacheKey, f64>,
    evaluations: usize,
}

impl Evaluator<'_> {
    /// Cluster values sorted descending, or `None` for infeasible positions.
    fn values(&mut self, x: &[f64]) -> Option<Vec<f64>> {
        let lens = self.t.piece_lengths(self.g, x)?;
        let mut vals = Vec::with_capacity(self.t.clusters.len());
        for (ci, c) in self.t.clusters.iter_mut().enumerate() {
            let cl: Vec<f64> = c.pieces.iter().map(|&p| lens[p]).collect();
            let key = (ci, cl.iter().map(|v| v.to_bits()).collect());
            let v = match self.cache.get(&key) {
                Some(&v) => v,
                None => {
                    c.skeleton.set_lengths(&cl);
                    self.evaluations += 1;
                    let k = c.skeleton.nth_k(self.kind.index()).ok()?;
                    self.cache.insert(key, k * k);
                    k * k
                }
            };
            vals.push(v);
        }
        vals.sort_by(|a, b| b.total_cmp(a));
        Some(vals)
    }
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Compass search on the lexicographically ordered, descending cluster values.
fn compass_search(ev: &mut Evaluator, x0: Vec<f64>, h_min: f64) -> Option<(Vec<f64>, Vec<f64>)> {
    let d = ev.t.dim();
    let mut x = x0;
    let mut fx = ev.values(&x)?;
    if d == 0 {
        return Some((x, fx));
    }
    let scale: Vec<f64> = ev.t.var_edge.iter().map(|&e| ev.g.edges()[e].length).collect();
    let mut h = 0.25;
    let mut dirs: Vec<Vec<(usize, f64)>> = Vec::new();
    for i in 0..d {
        dirs.push(vec![(i, 1.0)]);
        dirs.push(vec![(i, -1.0)]);
    }
    let axis = dirs.len();
    for i in 0..d {
        for j in (i + 1)..d {
            for (si, sj) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
                dirs.push(vec![(i, si), (j, sj)]);
            }
        }
    }
    let mut sweeps = 0;
    let mut creep = 0;
    while h >= h_min && sweeps < MAX_SWEEPS {
        sweeps += 1;
        let top = fx[0];
        let mut improved = false;
        for (n, dir) in dirs.iter().enumerate() {
            if n == axis && improved {
                break;
            }
            let mut y = x.clone();
            for &(i, s) in dir {
                y[i] += s * h * scale[i];
            }
            if let Some(fy) = ev.values(&y) {
                if lex_less(&fy, &fx) {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        // Only a lower top value widens the step; moves that improve lower
        // values alone count as creep and eventually shrink it.
        if improved && fx[0] < top {
            creep = 0;
            h = (2.0 * h).min(0.25);
        } else if improved && creep < MAX_CREEP {
            creep += 1;
        } else {
            creep = 0;
            h *= 0.5;
        }
    }
    Some((x, fx))
}

fn starts(t: &Template, g: &MetricGraph, rng: &mut Lcg, n_random: usize) -> Vec<Vec<f64>> {
    let counts = &t.class.counts;
    let even: Vec<f64> = counts
        .iter()
        .enumerate()
        .flat_map(|(e, &c)| {
            let len = g.edges()[e].length;
            (1..=c).map(move |j| len * j as f64 / (c + 1) as f64)
        })
        .collect();
    let mut out = vec![even];
    for _ in 0..n_random {
        let mut x = Vec::with_capacity(t.dim());
        for (e, &c) in counts.iter().enumerate() {
            let len = g.edges()[e].length;
            for j in 0..c {
                let u = rng.uniform(0.05, 0.95);
                x.push(len * (j as f64 + u) / c as f64);
            }
        }
        out.push(x);
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassTrace {
    pub class: String,
    pub energy: f64,
    /// False when the class was dropped after the coarse pass.
    pub refined: bool,
}

#[derive(Debug, Clone)]
pub struct MinimalPartitionResult {
    pub k: usize,
    pub kind: EnergyKind,
    pub energy: f64,
    pub partition: Partition,
    pub values: Vec<f64>,
    pub equipartition: bool,
    pub classes_examined: usize,
    pub evaluations: usize,
    /// Best energy per examined class, ascending.
    pub trace: Vec<ClassTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterOut {
    pub edges: Vec<String>,
    pub mu2_or_lambda1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinPartOut {
    pub k: usize,
    pub kind: EnergyKind,
    pub energy: f64,
    pub cuts: Vec<crate::graph::CutEntry>,
    pub clusters: Vec<ClusterOut>,
    pub equipartition: bool,
    pub classes_examined: usize,
}

impl MinimalPartitionResult {
    pub fn to_output(&self) -> MinPartOut {
        let mut cuts = self.partition.cuts.entries();
        for c in cuts.iter_mut() {
            if let crate::graph::CutEntry::Point { x, .. } = c {
                *x = round_sig(*x);
            }
        }
        MinPartOut {
            k: self.k,
            kind: self.kind,
            energy: round_sig(self.energy),
            cuts,
            clusters: self
                .partition
                .clusters
                .iter()
                .zip(&self.values)
                .map(|(c, &v)| ClusterOut {
                    edges: c.edges().iter().map(|e| e.id.clone()).collect(),
                    mu2_or_lambda1: round_sig(v),
                })
                .collect(),
            equipartition: self.equipartition,
            classes_examined: self.classes_examined,
        }
    }
}

/// Search settings. The defaults follow the documented method.
#[derive(Debug, Clone)]
pub struct SearchOptions {
    pub random_starts: usize,
    pub seed: u64,
    /// Stop when the relative step falls below this times `ℓ_min / ℓ_max`.
    pub step_tol: f64,
    pub budget: usize,
    /// Classes whose coarse energy exceeds the best coarse energy by more
    /// than this relative margin are not refined. `None` refines every class.
    pub screen_margin: Option<f64>,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { random_starts: 4, seed: 0x5eed, step_tol: 1e-10, budget: CLASS_BUDGET, screen_margin: Some(0.25) }
    }
}

/// Minimal `k`-partition energy of a tree.
pub fn minimal_partition(g: &MetricGraph, k: usize, kind: EnergyKind) -> Result<MinimalPartitionResult, PartitionError> {
    if !g.is_tree() {
        return Err(PartitionError::NotATree(g.betti_number()));
    }
    search(g, k, kind, &SearchOptions::default())
}

/// Minimal `k`-partition energy of a graph with cycles: the search runs over
/// classes that additionally break every cycle, so all clusters are trees.
pub fn minimal_partition_general(g: &MetricGraph, k: usize, kind: EnergyKind) -> Result<MinimalPartitionResult, PartitionError> {
    search(g, k, kind, &SearchOptions::default())
}

pub fn search(g: &MetricGraph, k: usize, kind: EnergyKind, opts: &SearchOptions) -> Result<MinimalPartitionResult, PartitionError> {
    if k < 2 {
        return Err(PartitionError::InfeasibleK(k));
    }
    let beta = g.betti_number();
    let weight = k - 1 + beta;
    let classes = enumerate_classes(g, weight, opts.budget)?;
    let templates: Vec<Template> = classes.iter().filter_map(|c| Template::build(g, c, k, kind)).collect();
    if templates.is_empty() {
        return Err(PartitionError::InfeasibleK(k));
    }
    let l_min = g.min_edge_length();
    let l_max = g.edges().iter().map(|e| e.length).fold(0.0, f64::max);
    let h_min = opts.step_tol * l_min / l_max;
    let mut rng = Lcg::new(opts.seed);
    let mut evaluators: Vec<Evaluator> = templates
        .into_iter()
        .map(|t| Evaluator { g, t, kind, cache: HashMap::new(), evaluations: 0 })
        .collect();

    // Coarse pass from the evenly spaced start.
    let coarse_h = if opts.screen_margin.is_some() { COARSE_STEP.max(h_min) } else { h_min };
    let mut coarse: Vec<Option<(Vec<f64>, Vec<f64>)>> = evaluators
        .iter_mut()
        .map(|ev| {
            let x0 = starts(&ev.t, g, &mut rng, 0).remove(0);
            compass_search(ev, x0, coarse_h)
        })
        .collect();
    let best_coarse = coarse.iter().flatten().map(|c| c.1[0]).fold(f64::INFINITY, f64::min);
    let threshold = opts.screen_margin.map_or(f64::INFINITY, |m| best_coarse * (1.0 + m));

    let mut trace = Vec::with_capacity(evaluators.len());
    let mut best: Option<(Vec<f64>, Vec<f64>, usize)> = None;
    for (i, ev) in evaluators.iter_mut().enumerate() {
        let Some((x, fx)) = coarse[i].take() else { continue };
        let refine = fx[0] <= threshold;
        let mut class_best = (x, fx);
        if refine && ev.t.dim() > 0 {
            let mut inits = vec![class_best.0.clone()];
            inits.extend(starts(&ev.t, g, &mut rng, opts.random_starts).into_iter().skip(1));
            for x0 in inits {
                if let Some((x, fx)) = compass_search(ev, x0, h_min) {
                    if lex_less(&fx, &class_best.1) || fx == class_best.1 {
                        class_best = (x, fx);
                    }
                }
            }
        }
        let (x, fx) = class_best;
        trace.push(ClassTrace { class: ev.t.class.signature(g), energy: fx[0], refined: refine });
        if refine && best.as_ref().is_none_or(|b| lex_less(&fx, &b.1)) {
            best = Some((x, fx, i));
        }
    }
    let evaluations = evaluators.iter().map(|e| e.evaluations).sum();
    let (x, _, bi) = best.ok_or(PartitionError::InfeasibleK(k))?;
    let t = &evaluators[bi].t;
    let cuts = t.cutset(g, &x);
    let p = partition(g, &cuts)?;
    let e = energy(&p, kind)?;
    trace.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(MinimalPartitionResult {
        k,
        kind,
        energy: e.energy,
        partition: p,
        values: e.values,
        equipartition: e.equipartition,
        classes_examined: trace.len(),
        evaluations,
        trace,
    })
}



fn rel_slack(hi: f64, lo: f64) -> f64 {
    (hi - lo) / hi.abs().max(lo.abs()).max(1e-300)
}

/// One instance of the chain `λ_{n-1} ≥ ℒ^N_{n-1} ≥ ℒ^D_{n-β} ≥ μ_{n-β}`,
/// where `λ` carries Dirichlet conditions at every vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterlacingReport {
    pub n: usize,
    pub beta: usize,
    pub lambda_n_minus_1: f64,
    pub l_n_n_minus_1: f64,
    pub l_d_n_minus_beta: f64,
    pub mu_n_minus_beta: f64,
    /// Relative slack of each of the three inequalities.
    pub slacks: [f64; 3],
    pub holds: bool,
}

/// Check the interlacing chain for one `n ≥ max(2, β + 1)` with relative slack `tol`.
pub fn verify_interlacing(g: &MetricGraph, n: usize, tol: f64) -> Result<InterlacingReport, PartitionError> {
    let beta = g.betti_number();
    if n < 2 || n < beta + 1 {
        return Err(PartitionError::InfeasibleK(n));
    }
    let all = g.vertices().iter().map(|v| v.id.clone());
    let lam = Skeleton::from_graph(g, &BoundaryCondition::dirichlet(all))?.nth_k(n - 1)?.powi(2);
    let standard = Skeleton::from_graph(g, &BoundaryCondition::Standard)?;
    let l_n = if n - 1 == 1 {
        standard.nth_k(2)?.powi(2)
    } else {
        minimal_partition_general(g, n - 1, EnergyKind::Neumann)?.energy
    };
    let m = n - beta;
    // A single cluster has no cut boundary; its Dirichlet ground state is the constant.
    let l_d = if m == 1 { 0.0 } else { minimal_partition_general(g, m, EnergyKind::Dirichlet)?.energy };
    let mu = standard.nth_k(m)?.powi(2);
    let slacks = [rel_slack(lam, l_n), rel_slack(l_n, l_d), rel_slack(l_d, mu)];
    let holds = slacks.iter().all(|&s| s >= -tol);
    Ok(InterlacingReport {
        n,
        beta,
        lambda_n_minus_1: lam,
        l_n_n_minus_1: l_n,
        l_d_n_minus_beta: l_d,
        mu_n_minus_beta: mu,
        slacks,
        holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurgeryTrial {
    pub cluster: usize,
    pub cut: GraphPoint,
    pub lambda_n_before: f64,
    pub lambda_n_after: f64,
    pub lambda_d_before: f64,
    pub lambda_d_after: f64,
    pub holds: bool,
}

fn bridges(g: &MetricGraph) -> Vec<bool> {
    (0..g.edge_count())
        .map(|skip| {
            let mut uf = UnionFind::new(g.vertex_count());
            for (e, edge) in g.edges().iter().enumerate() {
                if e != skip {
                    uf.union(edge.from, edge.to);
                }
            }
            let edge = &g.edges()[skip];
            uf.find(edge.from) != uf.find(edge.to)
        })
        .collect()
}

/// Random cuts that keep a cluster connected: `Λ^N` must not increase and
/// `Λ^D` must not decrease (new cut points join the Dirichlet boundary).
///
/// Each trial cuts `g` at one or two random points, picks a cluster that still
/// has a cycle and cuts one of its cycle edges.
pub fn verify_surgery_monotonicity(
    g: &MetricGraph,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<Vec<SurgeryTrial>, PartitionError> {
    if g.betti_number() == 0 {
        return Err(PartitionError::NoCycle);
    }
    let mut rng = Lcg::new(seed);
    let mut out = Vec::with_capacity(trials);
    let mut attempts = 0;
    while out.len() < trials {
        attempts += 1;
        if attempts > 100 * trials.max(1) {
            break;
        }
        let n_cuts = 1 + rng.below(2);
        let interior: Vec<GraphPoint> = (0..n_cuts)
            .map(|_| {
                let e = &g.edges()[rng.below(g.edge_count())];
                GraphPoint::new(e.id.clone(), e.length * rng.uniform(0.05, 0.95))
            })
            .collect();
        let base = CutSet { interior, splits: Vec::new() };
        let Ok(p) = partition(g, &base) else { continue };
        let candidates: Vec<usize> = (0..p.len()).filter(|&i| p.clusters[i].betti_number() > 0).collect();
        if candidates.is_empty() {
            continue;
        }
        let ci = candidates[rng.below(candidates.len())];
        let cluster = &p.clusters[ci];
        let cycle_edges: Vec<usize> = bridges(cluster).iter().enumerate().filter(|(_, &b)| !b).map(|(e, _)| e).collect();
        let piece = &cluster.edges()[cycle_edges[rng.below(cycle_edges.len())]];
        let cut = GraphPoint::new(piece.origin_edge.clone(), piece.origin_offset + piece.length * rng.uniform(0.05, 0.95));
        let mut after = p.cuts.clone();
        after.interior.push(cut.clone());
        let Ok(q) = partition(g, &after) else { continue };
        if q.len() != p.len() {
            continue;
        }
        let (n0, n1) = (lambda_n(&p)?.energy, lambda_n(&q)?.energy);
        let (d0, d1) = (lambda_d(&p)?.energy, lambda_d(&q)?.energy);
        let holds = n1 <= n0 + tol * n0.abs() && d1 >= d0 - tol * d0.abs();
        out.push(SurgeryTrial {
            cluster: ci,
            cut,
            lambda_n_before: n0,
            lambda_n_after: n1,
            lambda_d_before: d0,
            lambda_d_after: d1,
            holds,
        });
    }
    Ok(out)
}
