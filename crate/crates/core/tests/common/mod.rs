#![allow(dead_code)]

use nalgebra::DMatrix;
use qgraph::graph::{CutSet, GraphPoint, MetricGraph, VertexSplit};
use qgraph::partition::{energy, EnergyKind};

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

/// Inertia count of `K - λM` for P1 elements with lumped mass on a uniform
/// grid of spacing at most `h` per edge: number of eigenvalues below `λ`.
fn fd_count(g: &MetricGraph, h: f64, lambda: f64) -> usize {
    let nv = g.vertex_count();
    let mut s = DMatrix::<f64>::zeros(nv, nv);
    let mut negative = 0;
    for e in g.edges() {
        let n = ((e.length / h).ceil() as usize).max(2);
        let he = e.length / n as f64;
        let (a, b) = (e.from, e.to);
        let d_end = 1.0 / he - lambda * he / 2.0;
        s[(a, a)] += d_end;
        s[(b, b)] += d_end;
        let m = n - 1;
        let diag = 2.0 / he - lambda * he;
        let off = -1.0 / he;
        // LDLᵀ of the interior tridiagonal block, solving for its coupling to both ends.
        let mut d = vec![0.0; m];
        let mut ya = vec![0.0; m];
        let mut yb = vec![0.0; m];
        for i in 0..m {
            let prev = if i == 0 { 0.0 } else { off * off / d[i - 1] };
            d[i] = diag - prev;
            if d[i] < 0.0 {
                negative += 1;
            }
            let ra = if i == 0 { off } else { 0.0 };
            let rb = if i == m - 1 { off } else { 0.0 };
            ya[i] = ra - if i == 0 { 0.0 } else { off * ya[i - 1] / d[i - 1] };
            yb[i] = rb - if i == 0 { 0.0 } else { off * yb[i - 1] / d[i - 1] };
        }
        // Schur update: -c T⁻¹ cᵀ with c the coupling columns, via the forward sweep.
        let (mut saa, mut sab, mut sbb) = (0.0, 0.0, 0.0);
        for i in 0..m {
            saa += ya[i] * ya[i] / d[i];
            sab += ya[i] * yb[i] / d[i];
            sbb += yb[i] * yb[i] / d[i];
        }
        s[(a, a)] -= saa;
        s[(b, b)] -= sbb;
        s[(a, b)] -= sab;
        s[(b, a)] -= sab;
    }
    let eig = s.symmetric_eigen();
    negative + eig.eigenvalues.iter().filter(|&&v| v < 0.0).count()
}

/// First `count` eigenvalues of the finite-difference discretization.
pub fn fd_eigenvalues(g: &MetricGraph, count: usize) -> Vec<f64> {
    let h = g.min_edge_length() / 200.0;
    let mut hi = 1.0;
    while fd_count(g, h, hi) < count {
        hi *= 2.0;
    }
    (1..=count)
        .map(|j| {
            let (mut lo, mut up) = (-1.0, hi);
            while up - lo > 1e-12 * up.abs().max(1e-8) {
                let mid = 0.5 * (lo + up);
                if fd_count(g, h, mid) >= j {
                    up = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + up)
        })
        .collect()
}

/// Roots of `tan(2πx) + 2 tan(πx)` in `(a, b)` away from poles, by scanning and bisection.
pub fn tadpole_roots(a: f64, b: f64) -> Vec<f64> {
    use std::f64::consts::PI;
    let f = |x: f64| (2.0 * PI * x).tan() + 2.0 * (PI * x).tan();
    let n = 20_000;
    let mut roots = Vec::new();
    for i in 0..n {
        let x0 = a + (b - a) * i as f64 / n as f64;
        let x1 = a + (b - a) * (i + 1) as f64 / n as f64;
        let (f0, f1) = (f(x0), f(x1));
        // a sign change across a pole has a large jump; skip it
        if f0 * f1 < 0.0 && (f0 - f1).abs() < 10.0 {
            let (mut lo, mut hi) = (x0, x1);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(lo) * f(mid) <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
    }
    roots
}

/// Energy of the two-cluster partition given by one interior cut, or `None`
/// if the cut leaves the graph connected.
pub fn one_cut_energy(g: &MetricGraph, edge: usize, x: f64, kind: EnergyKind) -> Option<f64> {
    let cuts = CutSet { interior: vec![GraphPoint::new(g.edges()[edge].id.clone(), x)], splits: vec![] };
    let p = qgraph::graph::partition(g, &cuts).ok()?;
    (p.len() == 2).then(|| energy(&p, kind).ok().map(|e| e.energy)).flatten()
}

/// Minimal 2-partition energy of a tree by a dense grid over single cut
/// positions (step `step`), golden refinement around the best grid cell, and
/// every binary split of every vertex.
pub fn grid_oracle_k2(g: &MetricGraph, step: f64, kind: EnergyKind) -> (f64, String) {
    let mut best = (f64::INFINITY, String::new());
    for (ei, e) in g.edges().iter().enumerate() {
        let n = (e.length / step).ceil() as usize;
        let xs: Vec<f64> = (1..n).map(|i| e.length * i as f64 / n as f64).collect();
        let vals: Vec<f64> = xs.iter().map(|&x| one_cut_energy(g, ei, x, kind).unwrap_or(f64::INFINITY)).collect();
        let Some((i, _)) = vals.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)) else { continue };
        let lo = if i == 0 { 1e-9 * e.length } else { xs[i - 1] };
        let hi = if i + 1 == xs.len() { e.length * (1.0 - 1e-9) } else { xs[i + 1] };
        let f = |x: f64| one_cut_energy(g, ei, x, kind).unwrap_or(f64::INFINITY);
        let (mut a, mut b) = (lo, hi);
        let r = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let c = b - r * (b - a);
            let d = a + r * (b - a);
            if f(c) <= f(d) {
                b = d;
            } else {
                a = c;
            }
        }
        let x = 0.5 * (a + b);
        let v = f(x).min(vals[i]);
        if v < best.0 {
            best = (v, format!("{}@{x}", e.id));
        }
    }
    for v in 0..g.vertex_count() {
        let inc = g.incident(v);
        let d = inc.len();
        if d < 2 {
            continue;
        }
        for mask in 1..(1u32 << (d - 1)) {
            let mut groups = vec![Vec::new(), Vec::new()];
            for (j, &(e, end)) in inc.iter().enumerate() {
                groups[usize::from(mask >> j & 1 == 1)].push(g.edge_end(e, end));
            }
            let cuts = CutSet { interior: vec![], splits: vec![VertexSplit { vertex: g.vertices()[v].id.clone(), groups }] };
            let Ok(p) = qgraph::graph::partition(g, &cuts) else { continue };
            if p.len() != 2 {
                continue;
            }
            if let Ok(en) = energy(&p, kind) {
                if en.energy < best.0 {
                    best = (en.energy, format!("split {}", g.vertices()[v].id));
                }
            }
        }
    }
    best
}
