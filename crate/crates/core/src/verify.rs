//! Property suites over families of graphs. Each suite returns a report with
//! one case per (graph, index) and never panics on a violated property.

use serde::Serialize;
use serde_json::{json, Value};

use crate::graph::{CutEntry, GraphPoint, MetricGraph, Partition};
use crate::morse::{classify_function, is_morse, neumann_domains, neumann_points, nodal_domains, node_count, representatives};
use crate::partition::{minimal_partition_general, verify_interlacing, verify_surgery_monotonicity, EnergyKind};
use crate::spectral::{eigenvalues, BoundaryCondition, Eigenfunction, Eigenpair, Skeleton};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Case {
    pub graph: String,
    pub n: usize,
    pub status: Status,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
    pub cases: Vec<Case>,
}

impl SuiteReport {
    fn new(suite: &str, cases: Vec<Case>) -> Self {
        let count = |s| cases.iter().filter(|c| c.status == s).count();
        SuiteReport {
            suite: suite.into(),
            passed: count(Status::Pass),
            failed: count(Status::Fail),
            skipped: count(Status::Skip),
            cases,
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }

    /// Failing cases, which for graphs with cycles are witnesses rather than bugs.
    pub fn violations(&self) -> impl Iterator<Item = &Case> {
        self.cases.iter().filter(|c| c.status == Status::Fail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Courant,
    NodalCount,
    OneNode,
    NeumannIdentity,
    SpmEquality,
    Main2,
    Interlacing,
    Surgery,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Courant,
        Suite::NodalCount,
        Suite::OneNode,
        Suite::NeumannIdentity,
        Suite::SpmEquality,
        Suite::Main2,
        Suite::Interlacing,
        Suite::Surgery,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Courant => "courant",
            Suite::NodalCount => "nodal-count",
            Suite::OneNode => "one-node",
            Suite::NeumannIdentity => "neumann-identity",
            Suite::SpmEquality => "spm-equality",
            Suite::Main2 => "main2",
            Suite::Interlacing => "interlacing",
            Suite::Surgery => "surgery",
        }
    }

    pub fn parse(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|t| t.name() == s)
    }
}

/// Tolerances and sizes shared by the suites.
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub n_max: usize,
    pub seed: u64,
    pub trials: usize,
    pub eig_tol: f64,
    pub spm_tol: f64,
    pub cut_tol: f64,
    pub interlace_tol: f64,
    pub surgery_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            n_max: 6,
            seed: 7,
            trials: 50,
            eig_tol: 1e-6,
            spm_tol: 1e-5,
            cut_tol: 1e-5,
            interlace_tol: 1e-6,
            surgery_tol: 1e-8,
        }
    }
}

pub type Named = (String, MetricGraph);

pub fn run(suite: Suite, graphs: &[Named], opts: &VerifyOptions) -> SuiteReport {
    let cases = match suite {
        Suite::Courant => graphs.iter().flat_map(|g| courant(g, opts)).collect(),
        Suite::NodalCount => graphs.iter().flat_map(|g| nodal_count(g, opts)).collect(),
        Suite::OneNode => graphs.iter().flat_map(|g| one_node(g, opts)).collect(),
        Suite::NeumannIdentity => graphs.iter().flat_map(|g| neumann_identity(g, opts)).collect(),
        Suite::SpmEquality => graphs.iter().flat_map(|g| spm(g, opts, false)).collect(),
        Suite::Main2 => graphs.iter().flat_map(|g| spm(g, opts, true)).collect(),
        Suite::Interlacing => graphs.iter().flat_map(|g| interlacing(g, opts)).collect(),
        Suite::Surgery => graphs.iter().flat_map(|g| surgery(g, opts)).collect(),
    };
    SuiteReport::new(suite.name(), cases)
}

fn case(g: &Named, n: usize, status: Status, detail: Value) -> Case {
    Case { graph: g.0.clone(), n, status, detail }
}

fn error_case(g: &Named, n: usize, e: impl std::fmt::Display) -> Case {
    case(g, n, Status::Fail, json!({ "error": e.to_string() }))
}

fn pass_if(ok: bool) -> Status {
    if ok {
        Status::Pass
    } else {
        Status::Fail
    }
}

/// Eigenpairs covering indices `1..=n`, plus, for each index, its group,
/// the first index of that group and the chosen representative.
struct Indexed {
    pairs: Vec<Eigenpair>,
    /// `(group, first index of the group, representative)` per index, 1-based at 0.
    items: Vec<(usize, usize, Eigenfunction)>,
}

fn indexed(g: &MetricGraph, n: usize) -> Result<Indexed, crate::error::SolverError> {
    let pairs = eigenvalues(g, &BoundaryCondition::Standard, n)?;
    let mut items = Vec::with_capacity(n);
    let mut first = 1;
    for (gi, p) in pairs.iter().enumerate() {
        for f in representatives(g, p) {
            if items.len() < n {
                items.push((gi, first, f));
            }
        }
        first += p.multiplicity;
    }
    Ok(Indexed { pairs, items })
}

fn courant(g: &Named, opts: &VerifyOptions) -> Vec<Case> {
    let ix = match indexed(&g.1, opts.n_max) {
        Ok(ix) => ix,
        Err(e) => return vec![error_case(g, 0, e)],
    };
    ix.items
        .iter()
        .enumerate()
        .map(|(i, (gi, first, f))| {
            let n = i + 1;
            let phi = node_count(&g.1, f);
            // The bound applies to every eigenfunction of μ_n, so the
            // lowest index of a repeated eigenvalue is the binding one.
            let bound = first - 1;
            case(
                g,
                n,
                pass_if(phi <= bound),
                json!({ "mu": ix.pairs[*gi].mu, "phi": phi, "bound": bound, "morse": is_morse(&g.1, f) }),
            )
        })
        .collect()
}

fn nodal_count(g: &Named, opts: &VerifyOptions) -> Vec<Case> {
    let ix = match indexed(&g.1, opts.n_max) {
        Ok(ix) => ix,
        Err(e) => return vec![error_case(g, 0, e)],
    };
    ix.items
        .iter()
        .enumerate()
        .map(|(i, (gi, _, f))| {
            let n = i + 1;
            let pair = &ix.pairs[*gi];
            let class = classify_function(&g.1, f, pair.multiplicity);
            if !class.is_generic {
                return case(g, n, Status::Skip, json!({ "reasons": class.reasons }));
            }
            let phi = node_count(&g.1, f);
            let z = nodal_domains(&g.1, f).map(|p| p.len());
            match z {
                Ok(z) => case(g, n, pass_if(z == n && phi + 1 == n), json!({ "mu": pair.mu, "z": z, "phi": phi })),
                Err(e) => error_case(g, n, e),
            }
        })
        .collect()
}

fn mu2(c: &MetricGraph) -> Result<f64, crate::error::SolverError> {
    Ok(Skeleton::from_graph(c, &BoundaryCondition::Standard)?.nth_k(2)?.powi(2))
}

fn one_node(g: &Named, opts: &VerifyOptions) -> Vec<Case> {
    let ix = match indexed(&g.1, opts.n_max) {
        Ok(ix) => ix,
        Err(e) => return vec![error_case(g, 0, e)],
    };
    let m2 = match mu2(&g.1) {
        Ok(v) => v,
        Err(e) => return vec![error_case(g, 0, e)],
    };
    ix.items
        .iter()
        .enumerate()
        .map(|(i, (gi, _, f))| {
            let n = i + 1;
            let phi = node_count(&g.1, f);
            if !is_morse(&g.1, f) || phi != 1 {
                return case(g, n, Status::Skip, json!({ "phi": phi }));
            }
            let mu = ix.pairs[*gi].mu;
            let rel = (mu - m2).abs() / m2;
            case(g, n, pass_if(rel < opts.eig_tol), json!({ "mu": mu, "mu2": m2, "rel_err": rel }))
        })
        .collect()
}

fn neumann_identity(g: &Named, opts: &VerifyOptions) -> Vec<Case> {
    let ix = match indexed(&g.1, opts.n_max) {
        Ok(ix) => ix,
        Err(e) => return vec![error_case(g, 0, e)],
    };
    ix.items
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, (gi, _, f))| {
            let n = i + 1;
            if !is_morse(&g.1, f) {
                return case(g, n, Status::Skip, json!({ "reason": "not Morse" }));
            }
            let domains = match neumann_domains(&g.1, f) {
                Ok(p) => p,
                Err(e) => return case(g, n, Status::Skip, json!({ "reason": e.to_string() })),
            };
            if domains.len() != n - 1 {
                return case(g, n, Status::Skip, json!({ "neumann_domains": domains.len() }));
            }
            let mu = ix.pairs[*gi].mu;
            let values: Result<Vec<f64>, _> = domains.clusters.iter().map(mu2).collect();
            match values {
                Ok(values) => {
                    let worst = values.iter().map(|v| (v - mu).abs() / mu).fold(0.0, f64::max);
                    case(g, n, pass_if(worst < opts.eig_tol), json!({ "mu": mu, "mu2": values, "max_rel_err": worst }))
                }
                Err(e) => error_case(g, n, e),
            }
        })
        .collect()
}

/// Genericity of the `μ₂` eigenfunction of every cluster.
fn minimizers_generic(p: &Partition) -> Result<(bool, Vec<String>), crate::error::SolverError> {
    let mut reasons = Vec::new();
    for (i, c) in p.clusters.iter().enumerate() {
        let pairs = eigenvalues(c, &BoundaryCondition::Standard, 2)?;
        let Some((gi, _)) = crate::spectral::locate_index(&pairs, 2) else {
            reasons.push(format!("cluster {i}: no second eigenvalue"));
            continue;
        };
        let pair = &pairs[gi];
        let class = classify_function(c, &pair.basis[0], pair.multiplicity);
        reasons.extend(class.reasons.into_iter().map(|r| format!("cluster {i}: {r}")));
    }
    Ok((reasons.is_empty(), reasons))
}

/// Every Neumann point matches a cut of `p` and vice versa.
fn cuts_match(g: &MetricGraph, neumann: &[GraphPoint], p: &Partition, tol: f64) -> (bool, f64) {
    let entries = p.cuts.entries();
    if entries.len() != neumann.len() {
        return (false, f64::INFINITY);
    }
    let mut used = vec![false; entries.len()];
    let mut worst: f64 = 0.0;
    for q in neumann {
        let hit = entries.iter().enumerate().find_map(|(j, c)| {
            if used[j] {
                return None;
            }
            match (c, &q.vertex) {
                (CutEntry::Split { vertex, .. }, Some(v)) if vertex == v => Some((j, 0.0)),
                (CutEntry::Point { edge_id, x }, None) if *edge_id == q.edge_id => {
                    let e = g.edge_index(edge_id)?;
                    let d = (x - q.x).abs() / g.edges()[e].length;
                    (d < tol).then_some((j, d))
                }
                _ => None,
            }
        });
        match hit {
            Some((j, d)) => {
                used[j] = true;
                worst = worst.max(d);
            }
            None => return (false, f64::INFINITY),
        }
    }
    (true, worst)
}

/// `ℒ^N_n = μ_{n+1}` and, for `cuts`, agreement of the optimal cut set with
/// the Neumann points of `ψ_{n+1}`, on trees where the eigenfunction and the
/// computed minimizers are generic.
fn spm(g: &Named, opts: &VerifyOptions, cuts: bool) -> Vec<Case> {
    if !g.1.is_tree() {
        return vec![case(g, 0, Status::Skip, json!({ "reason": "not a tree" }))];
    }
    let ix = match indexed(&g.1, opts.n_max + 1) {
        Ok(ix) => ix,
        Err(e) => return vec![error_case(g, 0, e)],
    };
    (2..=opts.n_max)
        .map(|n| {
            let (gi, _, f) = &ix.items[n];
            let pair = &ix.pairs[*gi];
            let class = classify_function(&g.1, f, pair.multiplicity);
            if !class.is_generic {
                return case(g, n, Status::Skip, json!({ "reasons": class.reasons }));
            }
            let r = match minimal_partition_general(&g.1, n, EnergyKind::Neumann) {
                Ok(r) => r,
                Err(e) => return error_case(g, n, e),
            };
            if !r.equipartition {
                return case(g, n, Status::Skip, json!({ "reason": "optimal partition is not an equipartition", "energy": r.energy }));
            }
            match minimizers_generic(&r.partition) {
                Ok((true, _)) => {}
                Ok((false, reasons)) => return case(g, n, Status::Skip, json!({ "reasons": reasons })),
                Err(e) => return error_case(g, n, e),
            }
            let mu = pair.mu;
            let rel = (r.energy - mu).abs() / mu;
            if !cuts {
                return case(g, n, pass_if(rel < opts.spm_tol), json!({ "energy": r.energy, "mu_next": mu, "rel_err": rel }));
            }
            let points = match neumann_points(&g.1, f) {
                Ok(p) => p,
                Err(e) => return error_case(g, n, e),
            };
            let (ok, worst) = cuts_match(&g.1, &points, &r.partition, opts.cut_tol);
            case(
                g,
                n,
                pass_if(ok && rel < opts.spm_tol),
                json!({
                    "energy": r.energy,
                    "mu_next": mu,
                    "rel_err": rel,
                    "neumann_points": points.len(),
                    "cuts": r.partition.cuts.entries().len(),
                    "max_offset": if ok { json!(worst) } else { Value::Null },
                }),
            )
        })
        .collect()
}

fn interlacing(g: &Named, opts: &VerifyOptions) -> Vec<Case> {
    let beta = g.1.betti_number();
    (2.max(beta + 1)..=opts.n_max)
        .map(|n| match verify_interlacing(&g.1, n, opts.interlace_tol) {
            Ok(r) => case(g, n, pass_if(r.holds), serde_json::to_value(&r).unwrap_or(Value::Null)),
            Err(e) => error_case(g, n, e),
        })
        .collect()
}

fn surgery(g: &Named, opts: &VerifyOptions) -> Vec<Case> {
    if g.1.betti_number() == 0 {
        return vec![case(g, 0, Status::Skip, json!({ "reason": "no cycle to cut" }))];
    }
    match verify_surgery_monotonicity(&g.1, opts.trials, opts.seed, opts.surgery_tol) {
        Ok(trials) => trials
            .into_iter()
            .enumerate()
            .map(|(i, t)| case(g, i + 1, pass_if(t.holds), serde_json::to_value(&t).unwrap_or(Value::Null)))
            .collect(),
        Err(e) => vec![error_case(g, 0, e)],
    }
}
