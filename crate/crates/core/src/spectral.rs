//! Laplacian eigenvalues and eigenfunctions under standard vertex conditions,
//! optionally with Dirichlet conditions on a set of vertices.
//!
//! On each edge an eigenfunction for `μ = k² > 0` is `A cos(kx) + B sin(kx)`.
//! The vertex conditions give a square linear system `M(k) (A, B) = 0` of size
//! `2|E|`; eigenvalues are the `k` where `M(k)` is singular. Rows are built per
//! vertex: continuity differences and one Kirchhoff row for standard vertices,
//! one value row per incident end for Dirichlet vertices. Derivative rows are
//! divided by `k`.
//!
//! Roots are located by scanning `σ_min(M(k))` and checked against an exact
//! eigenvalue count obtained from the inertia of the vertex Dirichlet-to-Neumann
//! matrix, which also drives a cheaper solver for a single eigenvalue.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::SolverError;
use crate::graph::{End, MetricGraph};
use crate::linalg::{determinant, svd, symmetric_eigen, Matrix};

/// Singular values below `TOL_RANK * σ_max` count as zero.
pub const TOL_RANK: f64 = 1e-8;
/// Vertex-condition residual accepted for computed eigenfunctions.
pub const TOL_COND: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum BoundaryCondition {
    /// Standard conditions everywhere.
    #[default]
    Standard,
    /// Dirichlet on the listed vertex ids.
    Dirichlet(BTreeSet<String>),
    /// Dirichlet on every degree-1 vertex.
    Topological,
    /// Dirichlet on every cut-created vertex.
    CutBoundary,
}

impl BoundaryCondition {
    pub fn dirichlet<I, S>(ids: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        BoundaryCondition::Dirichlet(ids.into_iter().map(Into::into).collect())
    }

    pub fn mask(&self, g: &MetricGraph) -> Result<Vec<bool>, SolverError> {
        let n = g.vertex_count();
        Ok(match self {
            BoundaryCondition::Standard => vec![false; n],
            BoundaryCondition::Dirichlet(ids) => {
                let mut m = vec![false; n];
                for id in ids {
                    let v = g.vertex_index(id).ok_or_else(|| SolverError::UnknownVertex(id.clone()))?;
                    m[v] = true;
                }
                m
            }
            BoundaryCondition::Topological => (0..n).map(|v| g.degree(v) == 1).collect(),
            BoundaryCondition::CutBoundary => g.vertices().iter().map(|v| v.cut_created).collect(),
        })
    }
}

/// Index-only description of a graph and its Dirichlet set: all the solver needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Skeleton {
    n_vertices: usize,
    ends: Vec<[usize; 2]>,
    lengths: Vec<f64>,
    dirichlet: Vec<bool>,
    incidence: Vec<Vec<(usize, End)>>,
}

impl Skeleton {
    pub fn new(n_vertices: usize, ends: Vec<[usize; 2]>, lengths: Vec<f64>, dirichlet: Vec<bool>) -> Self {
        assert_eq!(ends.len(), lengths.len());
        assert_eq!(dirichlet.len(), n_vertices);
        let mut incidence = vec![Vec::new(); n_vertices];
        for (e, [a, b]) in ends.iter().enumerate() {
            incidence[*a].push((e, End::From));
            incidence[*b].push((e, End::To));
        }
        Skeleton { n_vertices, ends, lengths, dirichlet, incidence }
    }

    pub fn from_graph(g: &MetricGraph, bc: &BoundaryCondition) -> Result<Self, SolverError> {
        Ok(Self::new(
            g.vertex_count(),
            g.edges().iter().map(|e| [e.from, e.to]).collect(),
            g.edges().iter().map(|e| e.length).collect(),
            bc.mask(g)?,
        ))
    }

    pub fn edge_count(&self) -> usize {
        self.ends.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn set_lengths(&mut self, lengths: &[f64]) {
        self.lengths.copy_from_slice(lengths);
    }

    pub fn total_length(&self) -> f64 {
        self.lengths.iter().sum()
    }

    /// Number of connected components without a Dirichlet vertex, i.e. the
    /// multiplicity of the eigenvalue 0.
    pub fn zero_multiplicity(&self) -> usize {
        let mut uf = crate::graph::UnionFind::new(self.n_vertices);
        for &[a, b] in &self.ends {
            uf.union(a, b);
        }
        let mut has_edge = vec![false; self.n_vertices];
        let mut pinned = vec![false; self.n_vertices];
        for v in 0..self.n_vertices {
            let r = uf.find(v);
            if !self.incidence[v].is_empty() {
                has_edge[r] = true;
            }
            if self.dirichlet[v] {
                pinned[r] = true;
            }
        }
        (0..self.n_vertices).filter(|&v| uf.find(v) == v && has_edge[v] && !pinned[v]).count()
    }

    /// The square vertex-condition matrix at wavenumber `k > 0`.
    pub fn secular_matrix(&self, k: f64) -> Matrix {
        let n = 2 * self.ends.len();
        let mut m = Matrix::zeros(n, n);
        let trig: Vec<(f64, f64)> = self.lengths.iter().map(|&l| ((k * l).cos(), (k * l).sin())).collect();
        let value = |e: usize, end: End| -> [f64; 2] {
            match end {
                End::From => [1.0, 0.0],
                End::To => [trig[e].0, trig[e].1],
            }
        };
        let outgoing = |e: usize, end: End| -> [f64; 2] {
            match end {
                End::From => [0.0, 1.0],
                End::To => [trig[e].1, -trig[e].0],
            }
        };
        let mut row = 0;
        for v in 0..self.n_vertices {
            let inc = &self.incidence[v];
            if inc.is_empty() {
                continue;
            }
            if self.dirichlet[v] {
                for &(e, end) in inc {
                    let r = value(e, end);
                    m[(row, 2 * e)] += r[0];
                    m[(row, 2 * e + 1)] += r[1];
                    row += 1;
                }
            } else {
                let (e0, end0) = inc[0];
                let r0 = value(e0, end0);
                for &(e, end) in &inc[1..] {
                    let r = value(e, end);
                    m[(row, 2 * e)] += r[0];
                    m[(row, 2 * e + 1)] += r[1];
                    m[(row, 2 * e0)] -= r0[0];
                    m[(row, 2 * e0 + 1)] -= r0[1];
                    row += 1;
                }
                for &(e, end) in inc {
                    let r = outgoing(e, end);
                    m[(row, 2 * e)] += r[0];
                    m[(row, 2 * e + 1)] += r[1];
                }
                row += 1;
            }
        }
        debug_assert_eq!(row, n);
        m
    }

    /// `(σ_min, σ_max)` of the secular matrix.
    pub fn sigma_extremes(&self, k: f64) -> Result<(f64, f64), SolverError> {
        let s = svd(&self.secular_matrix(k))?;
        Ok((*s.s.last().unwrap(), s.s[0]))
    }

    /// Number of eigenvalues `μ < k²` counted with multiplicity, including
    /// zero eigenvalues. Returns `None` when `k` is too close to a point where
    /// the count is ill-conditioned (a Dirichlet eigenvalue of an edge, or an
    /// eigenvalue of the graph itself).
    pub fn count_below(&self, k: f64) -> Option<usize> {
        let mut n_d = 0;
        for &l in &self.lengths {
            let t = k * l / PI;
            if (t - t.round()).abs() < 1e-10 {
                return None;
            }
            n_d += t.floor() as usize;
        }
        let free: Vec<usize> = (0..self.n_vertices).map(|v| usize::from(!self.dirichlet[v])).collect();
        let mut index = vec![usize::MAX; self.n_vertices];
        let mut nf = 0;
        for v in 0..self.n_vertices {
            if free[v] == 1 && !self.incidence[v].is_empty() {
                index[v] = nf;
                nf += 1;
            }
        }
        if nf == 0 {
            return Some(n_d);
        }
        let mut lam = Matrix::zeros(nf, nf);
        for (e, &[a, b]) in self.ends.iter().enumerate() {
            let t = k * self.lengths[e];
            let (s, c) = t.sin_cos();
            let cot = c / s;
            let csc = 1.0 / s;
            let (ia, ib) = (index[a], index[b]);
            if a == b {
                if ia != usize::MAX {
                    lam[(ia, ia)] += 2.0 * (csc - cot);
                }
                continue;
            }
            if ia != usize::MAX {
                lam[(ia, ia)] -= cot;
            }
            if ib != usize::MAX {
                lam[(ib, ib)] -= cot;
            }
            if ia != usize::MAX && ib != usize::MAX {
                lam[(ia, ib)] += csc;
                lam[(ib, ia)] += csc;
            }
        }
        let scale = lam.max_abs().max(1.0);
        let (vals, _) = symmetric_eigen(&lam, false);
        if vals.iter().any(|v| v.abs() < 1e-12 * scale) {
            return None;
        }
        Some(n_d + vals.iter().filter(|&&v| v > 0.0).count())
    }

    /// Count at `k`, nudging by multiples of `h` when the count is ambiguous.
    /// Returns the count and the abscissa actually used.
    pub fn count_near(&self, k: f64, h: f64) -> (usize, f64) {
        for j in 0..12 {
            let step = (j / 2 + j % 2) as f64 * if j % 2 == 1 { 1.0 } else { -1.0 };
            let kk = k + step * h;
            if let Some(c) = self.count_below(kk) {
                return (c, kk);
            }
        }
        // Give up on exactness; the Dirichlet part is still exact.
        let kk = k + 0.5 * h;
        (self.count_below_lenient(kk), kk)
    }

    fn count_below_lenient(&self, k: f64) -> usize {
        let nudged = k * (1.0 + 1e-9);
        self.count_below(nudged).unwrap_or_else(|| {
            self.lengths.iter().map(|&l| (k * l / PI).floor() as usize).sum()
        })
    }

    /// Distinct roots (with multiplicity) in `(a, b]` given exact counts there.
    fn isolate(&self, a: f64, na: usize, b: f64, nb: usize, out: &mut Vec<(f64, usize)>) {
        if nb <= na {
            return;
        }
        if b - a <= 1e-12 * b {
            out.push((0.5 * (a + b), nb - na));
            return;
        }
        if nb - na == 1 {
            if let Some(r) = self.brent_det(a, b) {
                out.push((r, 1));
                return;
            }
        }
        let (nm, m) = self.count_near(0.5 * (a + b), (b - a) / 64.0);
        self.isolate(a, na, m, nm.clamp(na, nb), out);
        self.isolate(m, nm.clamp(na, nb), b, nb, out);
    }

    /// Brent's method on `det M(k)` over `[a, b]`, if the determinant changes sign.
    fn brent_det(&self, a: f64, b: f64) -> Option<f64> {
        let f = |k: f64| determinant(&self.secular_matrix(k));
        brent(f, a, b, 1e-14 * b)
    }

    /// The `n`-th wavenumber (1-based, with multiplicity) by count bisection
    /// and Brent refinement. Much cheaper than [`Skeleton::scan`] for a single value.
    pub fn nth_k(&self, n: usize) -> Result<f64, SolverError> {
        if n == 0 {
            return Err(SolverError::ZeroIndex);
        }
        let zero = self.zero_multiplicity();
        if n <= zero {
            return Ok(0.0);
        }
        if let Some(k) = self.interval_k(n) {
            return Ok(k);
        }
        let l = self.total_length();
        let mut a = PI / (4.0 * l);
        let mut na = self.count_near(a, 1e-3 * a).0;
        let mut b = PI * n as f64 / l;
        let mut nb;
        loop {
            let (c, bb) = self.count_near(b, 1e-6 * b);
            b = bb;
            nb = c;
            if nb >= n {
                break;
            }
            a = b;
            na = nb;
            b *= 2.0;
            if b > 1e6 * PI * n as f64 / l {
                return Err(SolverError::ScanExhausted { found: nb, k_cap: b });
            }
        }
        // Invariant: na < n <= nb.
        loop {
            if b - a <= 1e-13 * b {
                return Ok(0.5 * (a + b));
            }
            if na + 1 == n && nb == n {
                if let Some(r) = self.brent_det(a, b) {
                    return Ok(r);
                }
            }
            let (c, m) = self.count_near(0.5 * (a + b), (b - a) / 64.0);
            if c >= n {
                b = m;
                nb = c;
            } else {
                a = m;
                na = c;
            }
        }
    }

    /// Closed form for a single non-loop edge.
    fn interval_k(&self, n: usize) -> Option<f64> {
        if self.ends.len() != 1 || self.ends[0][0] == self.ends[0][1] {
            return None;
        }
        let l = self.lengths[0];
        let d = usize::from(self.dirichlet[self.ends[0][0]]) + usize::from(self.dirichlet[self.ends[0][1]]);
        let n = n as f64;
        Some(match d {
            0 => (n - 1.0) * PI / l,
            1 => (n - 0.5) * PI / l,
            _ => n * PI / l,
        })
    }

    /// Distinct wavenumbers with multiplicities covering at least `n_max`
    /// eigenvalues, ascending.
    ///
    /// Local minima of `σ_min(M(k))` on the grid `k_i = i Δk` are refined by
    /// golden-section search. Every grid cell is then checked against the exact
    /// count; cells where the scan missed or merged roots are redone by count
    /// bisection.
    pub fn scan(&self, n_max: usize) -> Result<Vec<(f64, usize)>, SolverError> {
        if n_max == 0 {
            return Err(SolverError::ZeroIndex);
        }
        let zero = self.zero_multiplicity();
        let mut roots: Vec<(f64, usize)> = Vec::new();
        if zero > 0 {
            roots.push((0.0, zero));
        }
        if zero >= n_max {
            return Ok(roots);
        }
        let l = self.total_length();
        let dk = PI / (16.0 * l);
        let k_cap = 4.0 * PI * (n_max as f64 + 1.0) / l;

        // Cell boundaries g_j ~ (j + 1/2) dk with exact counts.
        let h = 1e-6 * dk;
        let mut bounds = vec![(dk * 1e-3, zero)];
        let mut j = 0usize;
        loop {
            let (c, g) = self.count_near((j as f64 + 0.5) * dk, h);
            bounds.push((g, c));
            if c >= n_max {
                break;
            }
            if g > k_cap {
                return Err(SolverError::ScanExhausted { found: c, k_cap });
            }
            j += 1;
        }
        let last = bounds.len() - 1;

        let mut sig = Vec::with_capacity(last + 2);
        for i in 0..=last + 1 {
            sig.push(self.sigma_extremes(i as f64 * dk)?.0);
        }
        let mut found: Vec<(f64, usize)> = Vec::new();
        for i in 1..=last {
            if sig[i - 1] > sig[i] && sig[i] <= sig[i + 1] {
                let r = self.golden_min((i - 1) as f64 * dk, (i + 1) as f64 * dk)?;
                let s = svd(&self.secular_matrix(r))?;
                let tol = TOL_RANK * s.s[0];
                let mult = s.s.iter().filter(|&&x| x < tol).count();
                if mult > 0 {
                    found.push((r, mult));
                }
            }
        }
        found.sort_by(|a, b| a.0.total_cmp(&b.0));
        found.dedup_by(|b, a| {
            if (b.0 - a.0).abs() <= 1e-10 * a.0 {
                a.1 = a.1.max(b.1);
                true
            } else {
                false
            }
        });

        for c in 1..=last {
            let (ga, na) = bounds[c - 1];
            let (gb, nb) = bounds[c];
            let in_cell: Vec<(f64, usize)> =
                found.iter().copied().filter(|&(r, _)| r > ga && r <= gb).collect();
            let have: usize = in_cell.iter().map(|r| r.1).sum();
            if have == nb - na {
                roots.extend(in_cell);
            } else {
                log::debug!("scan cell ({ga}, {gb}]: found {have}, expected {}; isolating", nb - na);
                let mut fixed = Vec::new();
                self.isolate(ga, na, gb, nb, &mut fixed);
                roots.extend(fixed);
            }
        }
        roots.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut total = 0;
        let mut out = Vec::new();
        for r in roots {
            if total >= n_max {
                break;
            }
            total += r.1;
            out.push(r);
        }
        Ok(out)
    }

    /// Golden-section minimization of `σ_min` on `[a, b]` down to `|b - a| ≤ 1e-12 k`.
    fn golden_min(&self, mut a: f64, mut b: f64) -> Result<f64, SolverError> {
        let r = 0.5 * (5f64.sqrt() - 1.0);
        let f = |k: f64| self.sigma_extremes(k).map(|s| s.0);
        let mut x1 = b - r * (b - a);
        let mut x2 = a + r * (b - a);
        let mut f1 = f(x1)?;
        let mut f2 = f(x2)?;
        while b - a > 1e-12 * b {
            if f1 <= f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - r * (b - a);
                f1 = f(x1)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + r * (b - a);
                f2 = f(x2)?;
            }
        }
        Ok(if f1 <= f2 { x1 } else { x2 })
    }

    /// Orthonormal basis of the eigenspace at `k` with dimension `mult`.
    pub fn basis(&self, k: f64, mult: usize) -> Result<Vec<Eigenfunction>, SolverError> {
        if k == 0.0 {
            return Ok(self.zero_basis());
        }
        let s = svd(&self.secular_matrix(k))?;
        let tol = TOL_RANK * s.s[0];
        let found = s.s.iter().filter(|&&x| x < tol).count();
        if s.smallest(mult).last().is_some_and(|&x| x >= tol.max(1e-6 * s.s[0])) {
            return Err(SolverError::RankMismatch { k, expected: mult, found });
        }
        let raw: Vec<Eigenfunction> = (0..mult)
            .map(|i| {
                let x = s.null_vector(i);
                Eigenfunction { k, coeffs: x.chunks(2).map(|c| [c[0], c[1]]).collect() }
            })
            .collect();
        Ok(self.orthonormalize(raw))
    }

    fn zero_basis(&self) -> Vec<Eigenfunction> {
        let mut uf = crate::graph::UnionFind::new(self.n_vertices);
        for &[a, b] in &self.ends {
            uf.union(a, b);
        }
        let mut pinned = vec![false; self.n_vertices];
        for v in 0..self.n_vertices {
            if self.dirichlet[v] {
                pinned[uf.find(v)] = true;
            }
        }
        let mut roots: Vec<usize> = Vec::new();
        for &[a, _] in &self.ends {
            let r = uf.find(a);
            if !pinned[r] && !roots.contains(&r) {
                roots.push(r);
            }
        }
        roots
            .into_iter()
            .map(|r| {
                let len: f64 = (0..self.ends.len())
                    .filter(|&e| uf.find(self.ends[e][0]) == r)
                    .map(|e| self.lengths[e])
                    .sum();
                let c = 1.0 / len.sqrt();
                Eigenfunction {
                    k: 0.0,
                    coeffs: (0..self.ends.len())
                        .map(|e| if uf.find(self.ends[e][0]) == r { [c, 0.0] } else { [0.0, 0.0] })
                        .collect(),
                }
            })
            .collect()
    }

    /// L² Gram-Schmidt plus the sign convention (first significant coefficient positive).
    pub fn orthonormalize(&self, fs: Vec<Eigenfunction>) -> Vec<Eigenfunction> {
        let mut out: Vec<Eigenfunction> = Vec::with_capacity(fs.len());
        for mut f in fs {
            for _ in 0..2 {
                for q in &out {
                    let p = inner(&self.lengths, &f, q);
                    for (c, d) in f.coeffs.iter_mut().zip(&q.coeffs) {
                        c[0] -= p * d[0];
                        c[1] -= p * d[1];
                    }
                }
            }
            let norm = inner(&self.lengths, &f, &f).sqrt();
            if norm > 0.0 {
                for c in f.coeffs.iter_mut() {
                    c[0] /= norm;
                    c[1] /= norm;
                }
            }
            f.fix_sign();
            out.push(f);
        }
        out
    }

    /// Largest violation of the vertex conditions, relative to `max |f|`.
    /// Derivatives are divided by `k` when `k > 0`.
    pub fn vertex_residual(&self, f: &Eigenfunction) -> f64 {
        let sup = f.sup_norm(&self.lengths).max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for v in 0..self.n_vertices {
            let inc = &self.incidence[v];
            if inc.is_empty() {
                continue;
            }
            let vals: Vec<f64> = inc
                .iter()
                .map(|&(e, end)| f.eval(e, end_x(&self.lengths, e, end)).0)
                .collect();
            if self.dirichlet[v] {
                worst = vals.iter().fold(worst, |w, x| w.max(x.abs()));
                continue;
            }
            worst = vals.iter().fold(worst, |w, x| w.max((x - vals[0]).abs()));
            let scale = if f.k > 0.0 { f.k } else { 1.0 };
            let flux: f64 = inc
                .iter()
                .map(|&(e, end)| {
                    let d = f.eval(e, end_x(&self.lengths, e, end)).1 / scale;
                    if end == End::From {
                        d
                    } else {
                        -d
                    }
                })
                .sum();
            worst = worst.max(flux.abs());
        }
        worst / sup
    }
}

fn end_x(lengths: &[f64], e: usize, end: End) -> f64 {
    match end {
        End::From => 0.0,
        End::To => lengths[e],
    }
}

/// Brent's root finder on a bracket with a sign change.
pub fn brent<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, xtol: f64) -> Option<f64> {
    let (mut a, mut b) = (a, b);
    let (mut fa, mut fb) = (f(a), f(b));
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    let mut c = b;
    let mut fc = fb;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Some(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Some(b)
}

/// Edge coefficients of one eigenfunction: `f_e(x) = A cos(kx) + B sin(kx)`,
/// or `A + Bx` when `k = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenfunction {
    pub k: f64,
    pub coeffs: Vec<[f64; 2]>,
}

impl Eigenfunction {
    /// Value and derivative on edge `e` at coordinate `x`.
    pub fn eval(&self, e: usize, x: f64) -> (f64, f64) {
        let [a, b] = self.coeffs[e];
        if self.k == 0.0 {
            return (a + b * x, b);
        }
        let (s, c) = (self.k * x).sin_cos();
        (a * c + b * s, self.k * (b * c - a * s))
    }

    /// `max |f_e|` on `[0, ℓ]`.
    pub fn edge_sup(&self, e: usize, len: f64) -> f64 {
        let [a, b] = self.coeffs[e];
        let mut m = self.eval(e, 0.0).0.abs().max(self.eval(e, len).0.abs());
        if self.k > 0.0 {
            let r = a.hypot(b);
            let phi = b.atan2(a);
            // extrema at x = (phi + jπ)/k
            let j0 = ((-phi) / PI).ceil() as i64;
            let mut j = j0;
            loop {
                let x = (phi + j as f64 * PI) / self.k;
                if x > len {
                    break;
                }
                if x >= 0.0 {
                    m = r;
                    break;
                }
                j += 1;
            }
        }
        m
    }

    pub fn sup_norm(&self, lengths: &[f64]) -> f64 {
        lengths.iter().enumerate().fold(0.0, |m, (e, &l)| m.max(self.edge_sup(e, l)))
    }

    /// Make the first coefficient with magnitude above `1e-10 * max` positive.
    pub fn fix_sign(&mut self) {
        let max = self.coeffs.iter().flatten().fold(0.0f64, |m, x| m.max(x.abs()));
        if let Some(&first) = self.coeffs.iter().flatten().find(|x| x.abs() > 1e-10 * max) {
            if first < 0.0 {
                self.scale(-1.0);
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        for c in self.coeffs.iter_mut() {
            c[0] *= s;
            c[1] *= s;
        }
    }

    /// Linear combination `Σ w_i f_i` of functions sharing `k`.
    pub fn combine(fs: &[Eigenfunction], w: &[f64]) -> Eigenfunction {
        let mut coeffs = vec![[0.0; 2]; fs[0].coeffs.len()];
        for (f, &wi) in fs.iter().zip(w) {
            for (c, d) in coeffs.iter_mut().zip(&f.coeffs) {
                c[0] += wi * d[0];
                c[1] += wi * d[1];
            }
        }
        Eigenfunction { k: fs[0].k, coeffs }
    }
}

/// Closed-form `∫ cos², ∫ sin², ∫ cos·sin` of `kx` over `[0, ℓ]`.
fn trig_integrals(k: f64, l: f64) -> (f64, f64, f64) {
    if k == 0.0 {
        // basis 1, x
        return (l, l * l * l / 3.0, l * l / 2.0);
    }
    let s2 = (2.0 * k * l).sin() / (4.0 * k);
    let sk = (k * l).sin();
    (l / 2.0 + s2, l / 2.0 - s2, sk * sk / (2.0 * k))
}

/// L² inner product of two functions with the same `k`.
pub fn inner(lengths: &[f64], f: &Eigenfunction, g: &Eigenfunction) -> f64 {
    lengths
        .iter()
        .enumerate()
        .map(|(e, &l)| {
            let (icc, iss, ics) = trig_integrals(f.k, l);
            let [a1, b1] = f.coeffs[e];
            let [a2, b2] = g.coeffs[e];
            a1 * a2 * icc + b1 * b2 * iss + (a1 * b2 + b1 * a2) * ics
        })
        .sum()
}

/// One distinct eigenvalue with an orthonormal eigenspace basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub k: f64,
    pub mu: f64,
    pub multiplicity: usize,
    pub basis: Vec<Eigenfunction>,
}

/// The secular matrix of `g` at `k > 0`.
pub fn secular_matrix(g: &MetricGraph, bc: &BoundaryCondition, k: f64) -> Result<Matrix, SolverError> {
    Ok(Skeleton::from_graph(g, bc)?.secular_matrix(k))
}

pub use crate::linalg::smallest_singular_values;

/// The first `n_max` eigenvalues counted with multiplicity, grouped into
/// distinct eigenpairs. The last group may extend past `n_max`.
pub fn eigenvalues(g: &MetricGraph, bc: &BoundaryCondition, n_max: usize) -> Result<Vec<Eigenpair>, SolverError> {
    let sk = Skeleton::from_graph(g, bc)?;
    sk.scan(n_max)?
        .into_iter()
        .map(|(k, m)| {
            Ok(Eigenpair { k, mu: k * k, multiplicity: m, basis: sk.basis(k, m)? })
        })
        .collect()
}

/// Flattened eigenvalue list `μ_1 ≤ μ_2 ≤ …` with multiplicity, truncated to `n`.
pub fn eigenvalue_list(pairs: &[Eigenpair], n: usize) -> Vec<f64> {
    pairs.iter().flat_map(|p| std::iter::repeat_n(p.mu, p.multiplicity)).take(n).collect()
}

/// Position `(group, index within group)` of the `n`-th eigenvalue (1-based).
pub fn locate_index(pairs: &[Eigenpair], n: usize) -> Option<(usize, usize)> {
    let mut seen = 0;
    for (g, p) in pairs.iter().enumerate() {
        if n <= seen + p.multiplicity {
            return Some((g, n - seen - 1));
        }
        seen += p.multiplicity;
    }
    None
}

/// Recompute the orthonormal eigenspace basis for a given eigenpair.
pub fn eigenfunction_basis(g: &MetricGraph, bc: &BoundaryCondition, pair: &Eigenpair) -> Result<Vec<Eigenfunction>, SolverError> {
    Skeleton::from_graph(g, bc)?.basis(pair.k, pair.multiplicity)
}

/// Value and derivative of `f` at a point of `g`.
pub fn evaluate(g: &MetricGraph, f: &Eigenfunction, p: &crate::graph::GraphPoint) -> Result<(f64, f64), crate::error::GraphError> {
    let (e, x) = g.locate(p)?;
    Ok(f.eval(e, x))
}

/// `μ_n` of `g` under `bc` via the single-eigenvalue solver.
pub fn nth_eigenvalue(g: &MetricGraph, bc: &BoundaryCondition, n: usize) -> Result<f64, SolverError> {
    let k = Skeleton::from_graph(g, bc)?.nth_k(n)?;
    Ok(k * k)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CountReport {
    pub k_max: f64,
    /// Eigenvalues with `k_n ≤ K` found by the scan, including `k = 0`.
    pub scanned: usize,
    /// Same count from the inertia formula.
    pub exact: usize,
    pub weyl: f64,
    pub bound: f64,
    pub holds: bool,
    pub missed_root_suspected: bool,
}

/// Compare the number of scanned eigenvalues up to `K` with Weyl's law and
/// with the exact count.
pub fn eigenvalue_count_check(g: &MetricGraph, bc: &BoundaryCondition, k_max: f64) -> Result<CountReport, SolverError> {
    let sk = Skeleton::from_graph(g, bc)?;
    let kk = k_max * (1.0 + 1e-9);
    let exact = sk.count_near(kk, 1e-9 * k_max).0;
    let scanned = if exact == 0 {
        0
    } else {
        sk.scan(exact + 1)?.iter().filter(|r| r.0 <= kk).map(|r| r.1).sum()
    };
    let weyl = g.total_length() * k_max / PI;
    let bound = 2.0 * (g.edge_count() + g.vertex_count()) as f64;
    Ok(CountReport {
        k_max,
        scanned,
        exact,
        weyl,
        bound,
        holds: (scanned as f64 - weyl).abs() <= bound,
        missed_root_suspected: scanned != exact,
    })
}

/// CSV samples `edge_id,x,value,derivative`, `samples` points per edge
/// uniformly including endpoints.
pub fn sample_csv(g: &MetricGraph, f: &Eigenfunction, samples: usize) -> String {
    let mut out = String::from("edge_id,x,value,derivative\n");
    for (e, edge) in g.edges().iter().enumerate() {
        for i in 0..samples {
            let x = if samples <= 1 { 0.0 } else { edge.length * i as f64 / (samples - 1) as f64 };
            let (v, d) = f.eval(e, x);
            out.push_str(&format!(
                "{},{},{},{}\n",
                edge.id,
                crate::numfmt::fmt_sig(x),
                crate::numfmt::fmt_sig(v),
                crate::numfmt::fmt_sig(d)
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, EdgeSpec, GraphSpec};

    fn interval(l: f64) -> MetricGraph {
        build_graph(&GraphSpec {
            vertices: vec!["a".into(), "b".into()],
            edges: vec![EdgeSpec { id: "e".into(), from: "a".into(), to: "b".into(), length: l }],
        })
        .unwrap()
    }

    #[test]
    fn interval_nullspace_at_pi() {
        let m = secular_matrix(&interval(1.0), &BoundaryCondition::Standard, PI).unwrap();
        let s = svd(&m).unwrap();
        assert!(s.s[1] < 1e-12);
        assert!(s.s[0] > 0.5);
    }

    #[test]
    fn dirichlet_interval_full_rank_off_spectrum() {
        let bc = BoundaryCondition::dirichlet(["a", "b"]);
        let m = secular_matrix(&interval(1.0), &bc, PI / 2.0).unwrap();
        let s = svd(&m).unwrap();
        assert!(s.s[1] > 0.1);
    }

    #[test]
    fn interval_spectrum() {
        let pairs = eigenvalues(&interval(1.0), &BoundaryCondition::Standard, 4).unwrap();
        let mus = eigenvalue_list(&pairs, 4);
        for (j, mu) in mus.iter().enumerate() {
            let want = (j as f64 * PI).powi(2);
            assert!((mu - want).abs() <= 1e-9 * want.max(1.0), "{mu} vs {want}");
        }
    }

    #[test]
    fn interval_second_eigenfunction_is_root_two_cosine() {
        let pairs = eigenvalues(&interval(1.0), &BoundaryCondition::Standard, 2).unwrap();
        let f = &pairs[1].basis[0];
        let (v0, _) = f.eval(0, 0.0);
        let (v1, d1) = f.eval(0, 0.5);
        assert!((v0.abs() - 2f64.sqrt()).abs() < 1e-9);
        assert!(v1.abs() < 1e-9);
        assert!((d1.abs() - PI * 2f64.sqrt()).abs() < 1e-8);
    }

    #[test]
    fn count_below_interval() {
        let sk = Skeleton::from_graph(&interval(1.0), &BoundaryCondition::Standard).unwrap();
        assert_eq!(sk.count_below(0.5), Some(1));
        assert_eq!(sk.count_below(3.5), Some(2));
        assert_eq!(sk.count_below(7.0), Some(3));
        assert_eq!(sk.count_below(PI), None);
    }

    #[test]
    fn nth_matches_closed_form_for_mixed_interval() {
        let sk = Skeleton::new(2, vec![[0, 1]], vec![2.0], vec![false, true]);
        assert!((sk.nth_k(1).unwrap() - PI / 4.0).abs() < 1e-14);
        // same problem without the closed-form shortcut: split into two edges
        let sk2 = Skeleton::new(3, vec![[0, 1], [1, 2]], vec![0.7, 1.3], vec![false, false, true]);
        assert!((sk2.nth_k(1).unwrap() - PI / 4.0).abs() < 1e-12);
        assert!((sk2.nth_k(2).unwrap() - 3.0 * PI / 4.0).abs() < 1e-12);
    }

    #[test]
    fn evaluate_cosine() {
        let f = Eigenfunction { k: PI, coeffs: vec![[1.0, 0.0]] };
        let (v, d) = f.eval(0, 0.5);
        assert!(v.abs() < 1e-15 && (d + PI).abs() < 1e-14);
        assert_eq!(f.eval(0, 0.0), (1.0, 0.0));
    }

    #[test]
    fn brent_finds_root() {
        let r = brent(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        assert!(brent(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_none());
    }
}
