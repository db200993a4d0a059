use thiserror::Error;

/// Errors raised by the spectral pipeline. Messages start with the name of
/// the originating module.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("group_theory: degree mismatch ({left} vs {right})")]
    DegreeMismatch { left: usize, right: usize },

    #[error("group_theory: invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("group_theory: invalid Young diagram {0:?}")]
    InvalidDiagram(Vec<usize>),

    #[error("group_theory: degree {0} outside supported range 1..=8")]
    DegreeOutOfRange(usize),

    #[error("group_theory: relation `{relation}` violated, max residual {residual:.3e}")]
    RelationViolated { relation: String, residual: f64 },

    #[error("group_theory: {0}")]
    Projection(String),

    #[error("one_body: invalid trap: {0}")]
    InvalidTrap(String),

    #[error("one_body: grid too coarse (estimated error {estimate:.3e} at level {level}); use m >= {recommended_m}")]
    GridTooCoarse {
        level: usize,
        estimate: f64,
        recommended_m: usize,
    },

    #[error("one_body: position {x} outside domain [{min}, {max}]")]
    OutOfDomain { x: f64, min: f64, max: f64 },

    #[error("one_body: {0}")]
    OneBody(String),

    #[error("contact_tensor: quadrature error bound {bound:.3e} exceeds {limit:.1e}; {hint}")]
    Quadrature { bound: f64, limit: f64, hint: String },

    #[error("contact_tensor: {0}")]
    Tensor(String),

    #[error("weak_coupling: cutoff {e_cut} exceeds basis coverage {coverage}")]
    CutoffCoverage { e_cut: f64, coverage: f64 },

    #[error("weak_coupling: level {multiset:?} has accidental partners {partners:?}; merge explicitly")]
    AccidentalDegeneracy {
        multiset: Vec<usize>,
        partners: Vec<Vec<usize>>,
    },

    #[error("weak_coupling: {0}")]
    WeakCoupling(String),

    #[error("unitary_limit: {0}")]
    Unitary(String),

    #[error("unitary_limit: cannot fit: {0}")]
    Fit(String),

    #[error("exact_diag: {0}")]
    ExactDiag(String),

    #[error("io: {0}")]
    Io(String),

    #[error("format: {0}")]
    Format(String),
}

impl Error {
    /// Name of the module that produced the error.
    pub fn module(&self) -> &'static str {
        match self {
            Error::DegreeMismatch { .. }
            | Error::InvalidPermutation(_)
            | Error::InvalidDiagram(_)
            | Error::DegreeOutOfRange(_)
            | Error::RelationViolated { .. }
            | Error::Projection(_) => "group_theory",
            Error::InvalidTrap(_)
            | Error::GridTooCoarse { .. }
            | Error::OutOfDomain { .. }
            | Error::OneBody(_) => "one_body",
            Error::Quadrature { .. } | Error::Tensor(_) => "contact_tensor",
            Error::CutoffCoverage { .. } | Error::AccidentalDegeneracy { .. } | Error::WeakCoupling(_) => {
                "weak_coupling"
            }
            Error::Unitary(_) | Error::Fit(_) => "unitary_limit",
            Error::ExactDiag(_) => "exact_diag",
            Error::Io(_) | Error::Format(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
