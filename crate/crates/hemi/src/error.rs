use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("element outside the carrier: {0}")]
    Domain(String),
    #[error("structure is not comparable: {positive} has a positive defect, {negative} a negative one")]
    NotComparable { positive: String, negative: String },
    #[error("no sampled pair has positive merged entropy")]
    NoValidPairs,
    #[error("range error: {0}")]
    Range(String),
    #[error("a = {a} lies outside Xi = [{lo}, {hi}]")]
    OutOfXi { a: f64, lo: f64, hi: f64 },
    #[error("canonical coefficient is infinite; use rho_infty")]
    CanonicalUndefined,
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("division by zero entropy")]
    DivisionByZeroEntropy,
    #[error("infinite entropy encountered: {0}")]
    InfiniteEntropy(String),
    #[error("c_m series has not stabilized at depth {depth}")]
    DepthInsufficient { depth: usize },
    #[error("configuration error: {0}")]
    Config(String),
    #[error("kernel series too short: need {needed} terms, have {have}")]
    InsufficientSeries { needed: usize, have: usize },
    #[error("no commensurability relations supplied")]
    NoRelations,
    #[error("base entropy {base} is below the consistency bound {bound}")]
    BaseBelowM { base: f64, bound: f64 },
    #[error("coefficient {a} violates the scoring inequality at {witness}")]
    NotInA { a: f64, witness: String },
    #[error("scoring ratio exceeds the cap {cap} (observed {observed})")]
    SupUnbounded { observed: f64, cap: f64 },
    #[error("objective is not finite at {0}")]
    NonFiniteObjective(String),
    #[error("model assigns zero probability where data has mass (index {0})")]
    SupportMismatch(usize),
    #[error("design columns are not orthonormal (max deviation {0:e})")]
    DesignNotOrthogonal(f64),
    #[error("reliability-weighted mass is zero")]
    ZeroReliability,
    #[error("structure has no registered closed-form constants")]
    NoClosedForm,
    #[error("structure has no sampler")]
    NoSampler,
    #[error("schema error: {0}")]
    Schema(String),
}
