use thiserror::Error;

/// Errors raised by the arithmetic and hyperfield machinery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("polynomial is not Eisenstein: {0}")]
    NotEisenstein(String),
    #[error("defining polynomial of the unramified part is not irreducible mod p: {0}")]
    NotIrreducible(String),
    #[error("working precision {have} too small, need at least {need}")]
    PrecisionTooSmall { have: u32, need: u32 },
    #[error("operands belong to different fields")]
    MixedFields,
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("element is zero at working precision")]
    ZeroAtPrecision,
    #[error("element has negative valuation")]
    NegativeValuation,
    #[error("Hensel precondition failed: {0}")]
    HenselPreconditionFailed(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("axiom {axiom} violated at {witness}")]
    AxiomViolation { axiom: String, witness: String },
    #[error("p-power congruence failed at exponent {i}: {witness}")]
    CongruenceFailed { i: u32, witness: String },
    #[error("denominator is not a unit")]
    NonUnitDenominator,
    #[error("no root found: {0}")]
    NoRootFound(String),
    #[error("level {n} below the required threshold {needed}")]
    ThresholdNotMet { n: u32, needed: u32 },
    #[error("homomorphism condition ({condition}) violated at {witness}")]
    HomViolation { condition: u8, witness: String },
    #[error("residue embedding incompatible: {0}")]
    IncompatibleResidueEmbedding(String),
    #[error("field is not tamely ramified")]
    NotTame,
    #[error("Eisenstein polynomial is not of the form X^e - p*a: {0}")]
    NotNormalForm(String),
    #[error("restriction mismatch: {0}")]
    RestrictionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Budget errors are reported separately from domain errors by front ends.
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
