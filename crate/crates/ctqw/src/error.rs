//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by graph construction, spectral analysis and evaluation.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// The edge list does not connect every vertex to the origin.
    #[error("graph is disconnected: vertex {0} is unreachable from the origin")]
    DisconnectedGraph(usize),

    /// An edge joins a vertex to itself.
    #[error("self loop on vertex {0}")]
    SelfLoop(usize),

    /// A vertex index is out of range.
    #[error("vertex index {index} out of range for {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },

    /// The distance partition is not adapted to the adjacency structure:
    /// two vertices in the same stratum see different local degree counts.
    #[error(
        "not a quantum-decomposition graph: stratum {stratum} has vertices {a} and {b} \
         with different {kind} degrees ({da} vs {db})"
    )]
    NotQDGraph {
        stratum: usize,
        a: usize,
        b: usize,
        kind: DegreeKind,
        da: usize,
        db: usize,
    },

    /// Vector or matrix dimensions do not match.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A family parameter lies outside its admissible domain.
    #[error("parameter out of domain: {0}")]
    ParameterOutOfDomain(String),

    /// The requested operation is not defined for this family.
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    /// The family has no catalogued closed-form measure.
    #[error("no closed-form measure for family {0}; use jacobi_to_quadrature")]
    NoClosedFormMeasure(String),

    /// The requested quadrature order exceeds the length of a finite
    /// coefficient sequence.
    #[error("truncation order {order} exceeds sequence length {len}")]
    TruncationTooLarge { order: usize, len: usize },

    /// The symmetric eigensolver failed to converge.
    #[error("eigensolver failed to converge at order {0}")]
    EigenSolverFailure(usize),

    /// The continued fraction evaluated to a non-finite value.
    #[error("continued fraction diverged at z = {re}+{im}i (depth {depth})")]
    DivergentFraction { re: f64, im: f64, depth: usize },

    /// Adaptive integration failed to reach the requested tolerance.
    #[error("quadrature not converged: {0}")]
    QuadratureNotConverged(String),

    /// The family has no catalogued closed-form amplitude for this stratum.
    #[error("no closed-form amplitude for family {family} at stratum {k}")]
    NoClosedForm { family: String, k: usize },

    /// Probability leaked past the truncation boundary of the ODE system.
    #[error("tail mass {mass:.3e} at t = {t} exceeds the truncation budget {budget:.1e}")]
    TailMassExceeded { mass: f64, t: f64, budget: f64 },

    /// Two quadrature nodes coincide to working precision.
    #[error("degenerate quadrature nodes at x = {0} (spacing below 1e-9)")]
    DegenerateNodes(f64),

    /// The graph exceeds the dense-evolution size cap.
    #[error("graph with {n} vertices exceeds the dense evolution cap {cap}")]
    GraphTooLarge { n: usize, cap: usize },

    /// The density does not have the square-root endpoint behaviour the
    /// stationary-phase analysis requires.
    #[error("unsupported edge behaviour: {0}")]
    UnsupportedEdgeBehavior(String),

    /// The comparison window spans fewer than three oscillation periods.
    #[error("window [{t0}, {t1}] spans fewer than three oscillation periods")]
    WindowTooShort { t0: f64, t1: f64 },

    /// An exponent fit needs at least 20 samples spanning a decade.
    #[error("insufficient span for exponent fit: {0}")]
    InsufficientSpan(String),

    /// Closed moments are only available up to order four.
    #[error("unsupported moment order {0} (closed moments cover q <= 4)")]
    UnsupportedMomentOrder(usize),
}

/// Which of the three per-stratum degree counts failed to be constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DegreeKind {
    /// Edges into the previous stratum.
    Down,
    /// Edges within the stratum.
    Flat,
    /// Edges into the next stratum.
    Up,
}

impl std::fmt::Display for DegreeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DegreeKind::Down => write!(f, "downward"),
            DegreeKind::Flat => write!(f, "within-stratum"),
            DegreeKind::Up => write!(f, "upward"),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
