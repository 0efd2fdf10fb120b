use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("defining polynomial is not monic of degree >= 1")]
    NotMonic,
    #[error("defining polynomial is reducible: {0}")]
    Reducible(String),
    #[error("datasheet invalid: {0}")]
    DatasheetInvalid(String),
    #[error("datasheet required: {0}")]
    DatasheetRequired(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("prime {0} divides the index [O_K : Z[theta]] and has no datasheet entry")]
    IndexDivisor(String),
    #[error("valuation of zero")]
    ZeroElement,
    #[error("class order search bound {0} exhausted")]
    OrderBoundExceeded(u64),
    #[error("sublattice is not contained in the ambient lattice")]
    NotContained,
    #[error("card(S) = {0} < 2")]
    CardinalityTooSmall(usize),
    #[error("rank hypothesis fails at subfield {0}")]
    HypothesisFails(String),
    #[error("alpha search exhausted at coefficient bound {0}")]
    SearchExhausted(u32),
    #[error("index filtration did not stabilize within level {0}")]
    NotStabilized(u32),
    #[error("not a subfield: {0}")]
    NotASubfield(String),
    #[error("rank equality at a subfield without CM structure: {0}")]
    InconsistentCM(String),
    #[error("identity failed: {0}")]
    IdentityFailed(String),
    #[error("target is not in h Z[alpha^2] at the searched degree")]
    NotInLattice,
    #[error("prime lies in S")]
    PrimeInS,
    #[error("residue field of size {0} exceeds the bound {1}")]
    ResidueFieldTooLarge(u64, u64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unit logarithm could not be certified: {0}")]
    UnitLog(String),
}

pub type Result<T> = std::result::Result<T, Error>;
