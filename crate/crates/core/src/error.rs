use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("face pairing is not an involution at tetrahedron {tet}, face {face}")]
    NotInvolutive { tet: usize, face: usize },

    #[error("tetrahedron {tet}, face {face} is not paired")]
    UnpairedFace { tet: usize, face: usize },

    #[error("tetrahedron {tet}, face {face} is glued to itself")]
    SelfGluedFace { tet: usize, face: usize },

    #[error("gluing of tetrahedron {tet}, face {face} preserves orientation")]
    NotOrientable { tet: usize, face: usize },

    #[error("edge {a}{b} of tetrahedron {tet} is identified with itself in reverse")]
    InvalidEdge { tet: usize, a: usize, b: usize },

    #[error("vertex link {vertex} is not orientable")]
    NonOrientableLink { vertex: usize },

    #[error("shape parameter at quad {quad} is not in the open upper half-plane")]
    NotPositivelyOriented { quad: usize },

    #[error("shape parameter at quad {quad} is degenerate (0, 1 or non-finite)")]
    DegenerateShape { quad: usize },

    #[error("invalid angle point: {0}")]
    InvalidAngles(String),

    #[error("invalid arc path: {0}")]
    InvalidPath(String),

    #[error("curves lie on different vertex links ({0} and {1})")]
    NotSameLink(usize, usize),

    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    MaxIterations { iterations: usize, residual: f64 },

    #[error("left the positively oriented domain (minimum step reached)")]
    LeftDomain { last_valid: Vec<num_complex::Complex64> },

    #[error("line search found no residual decrease (residual {residual:e})")]
    LineSearchFailed { residual: f64 },

    #[error("stacked Jacobian has numerical rank {rank}, expected {expected}")]
    RankDeficientJacobian { rank: usize, expected: usize },

    #[error("infeasible target: sum of log-curvatures is {sum}, expected 2πi·{tets}")]
    InfeasibleTarget { sum: num_complex::Complex64, tets: usize },

    #[error("continuation step too large at path index {index}")]
    StepTooLarge { index: usize },

    #[error("{0} is a pole")]
    Pole(String),

    #[error("unknown fixture {0:?}")]
    UnknownFixture(String),

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
