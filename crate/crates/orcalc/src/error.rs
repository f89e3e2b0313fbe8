use thiserror::Error;

/// Library error type. Variants map one-to-one onto the precondition
/// failures of the operations that raise them.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not Hermitian: relative deviation {deviation:.3e} exceeds {tol:.3e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eig:.3e}")]
    NotPositive { min_eig: f64 },

    #[error("vector is not in the requested range (residual {residual:.3e})")]
    NotInRange { residual: f64 },

    #[error("vector is not in the operator domain (residual {residual:.3e})")]
    NotInDomain { residual: f64 },

    #[error("no solution: range inclusion fails (residual {residual:.3e})")]
    NoSolution { residual: f64 },

    #[error("operator is not a contraction: norm {norm:.6}")]
    NotContraction { norm: f64 },

    #[error("subspaces overlap: intersection has dimension {dim}")]
    Overlap { dim: usize },

    #[error("range mismatch: {what}")]
    RangeMismatch { what: String },

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("projection domain is a proper subspace; a full-domain form was requested")]
    DomainNotFull,

    #[error("factor pair is not optimal: {what}")]
    NotOptimal { what: String },

    #[error("nullspace condition violated: N(D) is not contained in N(A)")]
    NullspaceViolation,

    #[error("S + (BS)^perp does not span the whole space (defect {defect})")]
    NotSpanning { defect: usize },

    #[error("pair (B, S) is not weakly complementable (residual {residual:.3e})")]
    NotWeaklyComplementable { residual: f64 },

    #[error("projection is not a member of P*(B, S)")]
    NotMember,

    #[error("projection nullspace is not S^perp")]
    WrongNullspace,

    #[error("inadmissible perturbation W: {condition}")]
    InadmissibleW { condition: String },

    #[error("projection is not B-symmetric")]
    NotBSymmetric,

    #[error("unknown lab model: {model}")]
    BadModel { model: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the batch front end maps this error to.
    /// 1 = parse/io problems, 3 = violated mathematical precondition.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Io(_) | Error::BadModel { .. } => 1,
            Error::NotHermitian { .. } | Error::DimensionMismatch { .. } => 1,
            _ => 3,
        }
    }
}
