use thiserror::Error;

/// Failures while building or cutting a metric graph.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("edge `{edge}` has non-positive or non-finite length {length}")]
    ZeroOrNegativeLength { edge: String, length: f64 },
    #[error("edge `{edge}` references undeclared vertex `{vertex}`")]
    DanglingEndpoint { edge: String, vertex: String },
    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("identifier `{0}` is empty or declared twice")]
    BadIdentifier(String),
    #[error("cut point ({edge}, {x}) does not lie on the graph")]
    CutPointOffGraph { edge: String, x: f64 },
    #[error("duplicate cut at ({edge}, {x})")]
    DuplicateCut { edge: String, x: f64 },
    #[error("invalid split of vertex `{vertex}`: {reason}")]
    InvalidSplit { vertex: String, reason: String },
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("malformed graph description: {0}")]
    Parse(String),
}

/// Failures of the spectral solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("SVD did not converge after {0} iterations")]
    ConvergenceFailure(usize),
    #[error("only {found} eigenvalues found below the scan cap k = {k_cap}")]
    ScanExhausted { found: usize, k_cap: f64 },
    #[error("eigenspace at k = {k} has dimension {found}, expected {expected}")]
    RankMismatch { k: f64, expected: usize, found: usize },
    #[error("eigenvalue index must be at least 1")]
    ZeroIndex,
    #[error("Dirichlet vertex `{0}` is not a vertex of the graph")]
    UnknownVertex(String),
}

/// Failures of nodal/Neumann analysis and eigenfunction gluing.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("eigenfunction vanishes identically on edge `{0}`")]
    NotMorse(String),
    #[error("cluster eigenvalues differ: {0}")]
    NotEquipartition(String),
    #[error("minimizer vanishes at interface vertex `{0}`")]
    ZeroAtInterface(String),
    #[error("cluster minimizer {cluster} is not generic: {reason}")]
    NotGenericMinimizer { cluster: usize, reason: String },
    #[error("clusters do not form a tree of single-vertex interfaces: {0}")]
    BadInterface(String),
    #[error("eigenfunction is constant; every point is extremal")]
    Constant,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Failures of partition energies and the minimal-partition search.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PartitionError {
    #[error("cluster {0} has an empty boundary; Dirichlet energy undefined")]
    EmptyBoundary(usize),
    #[error("{classes} combinatorial classes exceed the budget of {budget}")]
    BudgetExceeded { classes: usize, budget: usize },
    #[error("no cut configuration produces {0} clusters")]
    InfeasibleK(usize),
    #[error("graph is not a tree (first Betti number {0})")]
    NotATree(usize),
    #[error("graph has no cycle, so every cut disconnects it")]
    NoCycle,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}
