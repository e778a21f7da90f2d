use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qgraph::error::{AnalysisError, GraphError, PartitionError, SolverError};
use qgraph::graph::MetricGraph;
use qgraph::morse::{domain_report, morse_representative, representative};
use qgraph::numfmt::{fmt_sig, round_sig};
use serde_json::Value;
use qgraph::partition::{search, EnergyKind, SearchOptions};
use qgraph::spectral::{eigenvalues, locate_index, sample_csv, BoundaryCondition, Eigenpair};
use qgraph::verify::{self, Named, Status, Suite, VerifyOptions};
use qgraph::zoo::{self, Lcg};

#[derive(Parser)]
#[command(name = "qgraph", version, about = "Spectra, nodal structure and spectral partitions of metric graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues with multiplicities.
    Spectrum {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long, default_value_t = 6)]
        count: usize,
        /// Comma-separated vertex ids with Dirichlet conditions.
        #[arg(long, value_delimiter = ',')]
        dirichlet: Vec<String>,
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        #[arg(long)]
        csv: bool,
    },
    /// Sample an eigenfunction as CSV.
    Eigenfunction {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        index: usize,
        #[arg(long, default_value_t = 101)]
        samples: usize,
        /// Output file; degenerate eigenvalues write one file per basis vector.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Nodal points and nodal domains of the n-th eigenfunction.
    NodalReport {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        index: usize,
        #[arg(long)]
        json: bool,
    },
    /// Neumann points and Neumann domains of the n-th eigenfunction.
    NeumannReport {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        index: usize,
        #[arg(long)]
        json: bool,
    },
    /// Spectral minimal k-partition.
    Minpart {
        #[command(flatten)]
        graph: GraphArgs,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Kind::Neumann)]
        kind: Kind,
        #[arg(long)]
        json: bool,
    },
    /// Run a property suite.
    Verify {
        /// courant, nodal-count, one-node, neumann-identity, spm-equality, main2, interlacing or surgery.
        theorem: String,
        /// Zoo name or graph file; may be repeated.
        #[arg(long)]
        graph: Vec<String>,
        #[arg(long)]
        random_trees: Option<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
        /// Overrides the suite's main tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Succeed only if at least one violation is found.
        #[arg(long)]
        expect_violation: bool,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Neumann,
    Dirichlet,
}

#[derive(Args)]
struct GraphArgs {
    /// Zoo graph: path, star3, tadpole or random-tree.
    zoo: Option<String>,
    /// Graph JSON file, or a zoo name.
    #[arg(long, conflicts_with = "zoo")]
    graph: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    length: f64,
    #[arg(long, value_delimiter = ',')]
    lengths: Option<Vec<f64>>,
    /// star3 with lengths 1, 1, 1 + epsilon.
    #[arg(long, conflicts_with = "lengths")]
    epsilon: Option<f64>,
    #[arg(long, default_value_t = 2.0 * PI)]
    loop_length: f64,
    #[arg(long, default_value_t = 2.0 * PI)]
    tail_length: f64,
    #[arg(long, default_value_t = 4)]
    edges: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
}

enum Failure {
    Input(String),
    Solver(String),
    Analysis(String),
    /// A complete report that still fails, printed on standard output.
    Verification { report: String, message: String },
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Input(_) => 2,
            Failure::Solver(_) => 3,
            Failure::Analysis(_) => 4,
            Failure::Verification { .. } => 5,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Solver(m) | Failure::Analysis(m) | Failure::Verification { message: m, .. } => m,
        }
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::UnknownVertex(_) | SolverError::ZeroIndex => Failure::Input(e.to_string()),
            _ => Failure::Solver(e.to_string()),
        }
    }
}

impl From<AnalysisError> for Failure {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::Graph(g) => g.into(),
            AnalysisError::Solver(s) => s.into(),
            _ => Failure::Analysis(e.to_string()),
        }
    }
}

impl From<PartitionError> for Failure {
    fn from(e: PartitionError) -> Self {
        match e {
            PartitionError::Graph(g) => g.into(),
            PartitionError::Solver(s) => s.into(),
            PartitionError::InfeasibleK(_) | PartitionError::NotATree(_) | PartitionError::NoCycle => Failure::Input(e.to_string()),
            _ => Failure::Analysis(e.to_string()),
        }
    }
}

type Outcome = Result<String, Failure>;

fn zoo_graph(name: &str, a: &GraphArgs) -> Result<MetricGraph, Failure> {
    let g = match name {
        "path" => zoo::path(a.length)?,
        "star3" => match (&a.lengths, a.epsilon) {
            (_, Some(eps)) => zoo::perturbed_star3(eps)?,
            (Some(l), None) => {
                let l: [f64; 3] = l
                    .as_slice()
                    .try_into()
                    .map_err(|_| Failure::Input(format!("star3 needs 3 lengths, got {}", l.len())))?;
                zoo::star3(l)?
            }
            (None, None) => zoo::star3([1.0; 3])?,
        },
        "tadpole" => zoo::tadpole(a.loop_length, a.tail_length)?,
        "random-tree" => zoo::random_tree(a.edges, &mut Lcg::new(a.seed))?,
        _ => return Err(Failure::Input(format!("unknown zoo graph `{name}`"))),
    };
    Ok(g)
}

fn graph_file(path: &Path) -> Result<MetricGraph, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(MetricGraph::from_json(&text)?)
}

fn load_graph(a: &GraphArgs) -> Result<MetricGraph, Failure> {
    match (&a.zoo, &a.graph) {
        (Some(name), _) => zoo_graph(name, a),
        (None, Some(src)) if Path::new(src).exists() => graph_file(Path::new(src)),
        (None, Some(src)) => zoo_graph(src, a),
        (None, None) => Err(Failure::Input("no graph given: name a zoo graph or pass --graph FILE".into())),
    }
}

fn named_graph(src: &str) -> Result<Named, Failure> {
    if Path::new(src).exists() {
        return Ok((src.to_string(), graph_file(Path::new(src))?));
    }
    let defaults = GraphArgs::parse_from_defaults();
    Ok((src.to_string(), zoo_graph(src, &defaults)?))
}

impl GraphArgs {
    fn parse_from_defaults() -> GraphArgs {
        #[derive(Parser)]
        struct Wrapper {
            #[command(flatten)]
            g: GraphArgs,
        }
        Wrapper::parse_from(["qgraph"]).g
    }
}

fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64().and_then(|x| serde_json::Number::from_f64(round_sig(x))) {
                *n = x;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_json),
        Value::Object(o) => o.values_mut().for_each(round_json),
        _ => {}
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes") + "\n"
}

fn spectrum(g: &MetricGraph, count: usize, dirichlet: &[String], as_json: bool, csv: bool) -> Outcome {
    let bc = if dirichlet.is_empty() { BoundaryCondition::Standard } else { BoundaryCondition::dirichlet(dirichlet) };
    let pairs = eigenvalues(g, &bc, count)?;
    let mut rows = Vec::new();
    let mut index = 1;
    for p in &pairs {
        if index > count {
            break;
        }
        rows.push((index, p));
        index += p.multiplicity;
    }
    let mut out = String::new();
    if as_json {
        let list: Vec<_> = rows
            .iter()
            .map(|(n, p)| serde_json::json!({ "index": n, "mu": round_sig(p.mu), "k": round_sig(p.k), "multiplicity": p.multiplicity }))
            .collect();
        out = json(&serde_json::json!({ "eigenvalues": list }));
    } else if csv {
        out.push_str("index,mu,k,multiplicity\n");
        for (n, p) in &rows {
            let _ = writeln!(out, "{n},{},{},{}", fmt_sig(p.mu), fmt_sig(p.k), p.multiplicity);
        }
    } else {
        let _ = writeln!(out, "{:>5}  {:>18}  {:>16}  mult", "index", "mu", "k");
        for (n, p) in &rows {
            let _ = writeln!(out, "{n:>5}  {:>18}  {:>16}  {}", fmt_sig(p.mu), fmt_sig(p.k), p.multiplicity);
        }
    }
    Ok(out)
}

fn pairs_through(g: &MetricGraph, index: usize) -> Result<Vec<Eigenpair>, Failure> {
    if index == 0 {
        return Err(Failure::Input("eigenvalue index must be at least 1".into()));
    }
    Ok(eigenvalues(g, &BoundaryCondition::Standard, index)?)
}

fn eigenfunction(g: &MetricGraph, index: usize, samples: usize, out: Option<&Path>) -> Outcome {
    let pairs = pairs_through(g, index)?;
    let (grp, _) = locate_index(&pairs, index).ok_or_else(|| Failure::Solver(format!("index {index} beyond computed range")))?;
    let pair = &pairs[grp];
    let rep = representative(g, &pairs, index).ok_or_else(|| Failure::Solver(format!("no eigenfunction for index {index}")))?;
    let Some(path) = out else {
        return Ok(sample_csv(g, &rep, samples));
    };
    let mut files = vec![(path.to_path_buf(), sample_csv(g, &rep, samples))];
    if pair.multiplicity > 1 {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("eigenfunction");
        let sibling = |suffix: String| path.with_file_name(format!("{stem}_{suffix}.csv"));
        files = pair.basis.iter().enumerate().map(|(i, f)| (sibling(format!("basis{}", i + 1)), sample_csv(g, f, samples))).collect();
        if let Some(m) = morse_representative(g, &pair.basis) {
            files.push((sibling("morse".into()), sample_csv(g, &m, samples)));
        }
    }
    for (p, text) in &files {
        std::fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
    }
    Ok(files.iter().map(|(p, _)| format!("wrote {}\n", p.display())).collect())
}

fn report(g: &MetricGraph, index: usize, neumann: bool, as_json: bool) -> Outcome {
    let pairs = pairs_through(g, index)?;
    let (grp, _) = locate_index(&pairs, index).ok_or_else(|| Failure::Solver(format!("index {index} beyond computed range")))?;
    let pair = &pairs[grp];
    let mut f = representative(g, &pairs, index).ok_or_else(|| Failure::Solver(format!("no eigenfunction for index {index}")))?;
    let mut r = domain_report(g, &f, pair.multiplicity)?;
    let constant = r.notes.iter().any(|n| n.starts_with("constant"));
    if neumann && !constant && !r.neumann_applicable {
        f = morse_representative(g, &pair.basis)
            .ok_or_else(|| Failure::Analysis(format!("no Morse eigenfunction for index {index}: {}", r.reasons.join("; "))))?;
        r = domain_report(g, &f, pair.multiplicity)?;
        r.notes.push("representative replaced by a Morse combination of the eigenspace".into());
    }
    if as_json {
        return Ok(json(&r));
    }
    let mut out = format!("index {index}: mu = {}, multiplicity {}, generic {}\n", fmt_sig(r.mu), r.multiplicity, r.is_generic);
    for reason in &r.reasons {
        let _ = writeln!(out, "  {reason}");
    }
    let (label, points, domains) = if neumann {
        ("Neumann", &r.neumann_points, &r.neumann_domains)
    } else {
        ("nodal", &r.nodal_points, &r.nodal_domains)
    };
    let _ = writeln!(out, "{} {label} points", points.len());
    for p in points {
        let _ = writeln!(out, "  {} {}", p.edge_id, fmt_sig(p.x));
    }
    let _ = writeln!(out, "{} {label} domains", domains.len());
    for d in domains {
        let _ = writeln!(out, "  length {}  mu2 {}  edges {}", fmt_sig(d.length), fmt_sig(d.mu2), d.edges.join(","));
    }
    for note in &r.notes {
        let _ = writeln!(out, "note: {note}");
    }
    Ok(out)
}

fn minpart(g: &MetricGraph, k: usize, kind: Kind, as_json: bool) -> Outcome {
    let kind = match kind {
        Kind::Neumann => EnergyKind::Neumann,
        Kind::Dirichlet => EnergyKind::Dirichlet,
    };
    let out = search(g, k, kind, &SearchOptions::default())?.to_output();
    if as_json {
        return Ok(json(&out));
    }
    let mut s = format!("k = {k}, energy {}, equipartition {}, {} classes examined\n", fmt_sig(out.energy), out.equipartition, out.classes_examined);
    let _ = writeln!(s, "cuts: {}", serde_json::to_string(&out.cuts).expect("cuts serialize"));
    for (i, c) in out.clusters.iter().enumerate() {
        let _ = writeln!(s, "  cluster {}: {}  edges {}", i + 1, fmt_sig(c.mu2_or_lambda1), c.edges.join(","));
    }
    Ok(s)
}

#[allow(clippy::too_many_arguments)]
fn run_verify(
    theorem: &str,
    sources: &[String],
    random_trees: Option<usize>,
    seed: u64,
    nmax: usize,
    tol: Option<f64>,
    trials: usize,
    expect_violation: bool,
    as_json: bool,
) -> Outcome {
    let suite = Suite::parse(theorem).ok_or_else(|| {
        let names: Vec<_> = Suite::ALL.iter().map(|s| s.name()).collect();
        Failure::Input(format!("unknown theorem `{theorem}`; expected one of {}", names.join(", ")))
    })?;
    let mut graphs = sources.iter().map(|s| named_graph(s)).collect::<Result<Vec<_>, _>>()?;
    if let Some(n) = random_trees {
        graphs.extend(zoo::random_tree_family(n, seed).into_iter().enumerate().map(|(i, g)| (format!("tree{i}"), g)));
    }
    if graphs.is_empty() {
        return Err(Failure::Input("no graphs: pass --graph or --random-trees".into()));
    }
    let mut opts = VerifyOptions { n_max: nmax, seed, trials, ..VerifyOptions::default() };
    if let Some(t) = tol {
        match suite {
            Suite::SpmEquality | Suite::Main2 => opts.spm_tol = t,
            Suite::Interlacing => opts.interlace_tol = t,
            Suite::Surgery => opts.surgery_tol = t,
            _ => opts.eig_tol = t,
        }
    }
    let mut r = verify::run(suite, &graphs, &opts);
    for c in r.cases.iter_mut() {
        round_json(&mut c.detail);
    }
    let text = if as_json {
        json(&r)
    } else {
        let mut s = String::new();
        for c in &r.cases {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skip => "skip",
            };
            let _ = writeln!(s, "{:<10} {:>3}  {status}  {}", c.graph, c.n, c.detail);
        }
        let _ = writeln!(s, "{}: {} passed, {} failed, {} skipped", r.suite, r.passed, r.failed, r.skipped);
        s
    };
    match (expect_violation, r.ok()) {
        (false, true) | (true, false) => Ok(text),
        (false, false) => Err(Failure::Verification { report: text, message: format!("{} violation(s)", r.failed) }),
        (true, true) => Err(Failure::Verification { report: text, message: "expected a violation, found none".into() }),
    }
}

fn execute(cli: Cli) -> Outcome {
    match cli.command {
        Command::Spectrum { graph, count, dirichlet, json, csv } => spectrum(&load_graph(&graph)?, count, &dirichlet, json, csv),
        Command::Eigenfunction { graph, index, samples, out } => eigenfunction(&load_graph(&graph)?, index, samples, out.as_deref()),
        Command::NodalReport { graph, index, json } => report(&load_graph(&graph)?, index, false, json),
        Command::NeumannReport { graph, index, json } => report(&load_graph(&graph)?, index, true, json),
        Command::Minpart { graph, k, kind, json } => minpart(&load_graph(&graph)?, k, kind, json),
        Command::Verify { theorem, graph, random_trees, seed, nmax, tol, trials, expect_violation, json } => {
            run_verify(&theorem, &graph, random_trees, seed, nmax, tol, trials, expect_violation, json)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QGRAPH_LOG", "warn")).init();
    match execute(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(f) => {
            if let Failure::Verification { report, .. } = &f {
                print!("{report}");
            }
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
