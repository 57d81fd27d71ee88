use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("DomainError: {0}")]
    DomainError(String),
    #[error("DegenerateCF: a tail of the continued fraction evaluates to zero")]
    DegenerateCF,
    #[error("Overflow: {0} does not fit in 64 bits")]
    Overflow(String),
    #[error("LengthMismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("DependentNormals: the normal vectors are linearly dependent")]
    DependentNormals,
    #[error("NotInLattice: vector is not in the lattice")]
    NotInLattice,
    #[error("SearchBudgetExceeded: {what} needed more than {budget} steps")]
    SearchBudgetExceeded { what: String, budget: u64 },
    #[error("NotIsomorphic: {0}")]
    NotIsomorphic(String),
    #[error("NotPositiveDefinite: Gram matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("NotNormalized: {0}")]
    NotNormalized(String),
    #[error("LensSpaceDegenerate: {partial}")]
    LensSpaceDegenerate { partial: String },
    #[error("NotRationalHomologySphere: e - sum q_i/p_i = 0 for {0}")]
    NotRationalHomologySphere(String),
    #[error("NotQuasiAlternating: {0}")]
    NotQuasiAlternating(String),

    #[error("IncompatibleStable: {0}")]
    IncompatibleStable(String),
    #[error("NotChangemaker: {0}")]
    NotChangemaker(String),
    #[error("WrongRegime: {0}")]
    WrongRegime(String),
    #[error("NoRealizingTuple: {0}")]
    NoRealizingTuple(String),
    #[error("AmbiguousTuple: {0}")]
    AmbiguousTuple(String),

    #[error("ReducibleSurgery: slope {0} equals rs")]
    ReducibleSurgery(String),
    #[error("NotSeifertSlope: {0}")]
    NotSeifertSlope(String),
    #[error("InvalidKnot: {0}")]
    InvalidKnot(String),

    #[error("NothingToDo: {0}")]
    NothingToDo(String),
    #[error("NotBlowable: {0}")]
    NotBlowable(String),
    #[error("UnsupportedShape: {0}")]
    UnsupportedShape(String),
    #[error("NoSuchNode: {0}")]
    NoSuchNode(usize),

    #[error("UnsupportedRegime: {0}")]
    UnsupportedRegime(String),
    #[error("IntegerSlope: {0}")]
    IntegerSlope(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Exit code for the CLI: 1 usage/parse, 2 internal, 3 typed domain error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 1,
            Error::Internal(_) | Error::AmbiguousTuple(_) => 2,
            _ => 3,
        }
    }

    /// Variant name, as printed by the CLI.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse(_) => "ParseError",
            Error::DomainError(_) => "DomainError",
            Error::DegenerateCF => "DegenerateCF",
            Error::Overflow(_) => "Overflow",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::DependentNormals => "DependentNormals",
            Error::NotInLattice => "NotInLattice",
            Error::SearchBudgetExceeded { .. } => "SearchBudgetExceeded",
            Error::NotIsomorphic(_) => "NotIsomorphic",
            Error::NotPositiveDefinite => "NotPositiveDefinite",
            Error::NotNormalized(_) => "NotNormalized",
            Error::LensSpaceDegenerate { .. } => "LensSpaceDegenerate",
            Error::NotRationalHomologySphere(_) => "NotRationalHomologySphere",
            Error::NotQuasiAlternating(_) => "NotQuasiAlternating",
            Error::IncompatibleStable(_) => "IncompatibleStable",
            Error::NotChangemaker(_) => "NotChangemaker",
            Error::WrongRegime(_) => "WrongRegime",
            Error::NoRealizingTuple(_) => "NoRealizingTuple",
            Error::AmbiguousTuple(_) => "AmbiguousTuple",
            Error::ReducibleSurgery(_) => "ReducibleSurgery",
            Error::NotSeifertSlope(_) => "NotSeifertSlope",
            Error::InvalidKnot(_) => "InvalidKnot",
            Error::NothingToDo(_) => "NothingToDo",
            Error::NotBlowable(_) => "NotBlowable",
            Error::UnsupportedShape(_) => "UnsupportedShape",
            Error::NoSuchNode(_) => "NoSuchNode",
            Error::UnsupportedRegime(_) => "UnsupportedRegime",
            Error::IntegerSlope(_) => "IntegerSlope",
            Error::Internal(_) => "InternalError",
        }
    }
}
