use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid ring specification: {0}")]
    InvalidSpec(String),
    #[error("operands belong to different rings")]
    SpecMismatch,
    #[error("element is not a unit (valuation {0})")]
    NotAUnit(u32),
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("substitution argument has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("index {index} out of range 0..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("degree overflow: {0}")]
    DegreeOverflow(String),
    #[error("crystal is not admissible: {0}")]
    NotAdmissible(String),
    #[error("not a stratification: coefficient {index} deviates from the recursion")]
    NotAStratification { index: usize },
    #[error("cocycle violation at {at}")]
    CocycleViolation { at: String },
    #[error("d∘d is nonzero at level {level}, input {input}, monomial {monomial}")]
    ComplexViolation { level: usize, input: String, monomial: String },
    #[error("chain map violation: {0}")]
    ChainMapViolation(String),
    #[error("input is not a cocycle: {0}")]
    NotInKernel(String),
    #[error("input is not in the image: {0}")]
    NotInImage(String),
    #[error("reconstructed preimage does not match: {0}")]
    ReconstructionMismatch(String),
    #[error("unsupported level {0}")]
    UnsupportedLevel(usize),
    #[error("relation {relation} fails at index {index}")]
    RelationViolation { relation: String, index: String },
    #[error("invariants mismatch: {0}")]
    InvariantsMismatch(String),
    #[error("cocycle identity fails for ({g}, {h}) at {at}")]
    CocycleIdentityViolation { g: String, h: String, at: String },
    #[error("derivative of E vanishes to the working precision")]
    DerivativePrecisionLoss,
    #[error("truncation loss: {0}")]
    TruncationLoss(String),
    #[error("division failure: {0}")]
    DivisionFailure(String),
    #[error("structure violation: {0}")]
    StructureViolation(String),
    #[error("cyclotomic polynomial is reducible over K: {0}")]
    ZetaReducible(String),
    #[error("parse error: {0}")]
    Parse(String),
}
