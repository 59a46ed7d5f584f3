use thiserror::Error;

#[derive(Debug, Error)]
pub enum GroupError {
    #[error("empty multiplication table")]
    Empty,
    #[error("row {row} has length {len}, expected {order}")]
    RaggedTable { row: usize, len: usize, order: usize },
    #[error("element index {index} out of range for group of order {order}")]
    IndexOutOfRange { index: usize, order: usize },
    #[error("index 0 is not a two-sided identity (fails at element {element})")]
    NoIdentityAtZero { element: usize },
    #[error("table is not a latin square ({line} repeats an entry)")]
    NotLatinSquare { line: String },
    #[error("multiplication is not associative at ({a}, {b}, {c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("unknown group spec `{0}`")]
    UnknownSpec(String),
    #[error("group order {order} exceeds the configured bound {bound}")]
    OrderBoundExceeded { order: usize, bound: usize },
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse {path}: {message}")]
    Parse { path: String, message: String },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CyclotomicError {
    #[error("galois exponent {k} is not coprime to conductor {conductor}")]
    NotCoprime { k: i64, conductor: u32 },
    #[error("malformed cyclotomic: {0}")]
    Malformed(String),
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Debug, Error)]
pub enum CohomologyError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("cocycle violates normalization at ({0}, {1}, {2})")]
    NotNormalized(usize, usize, usize),
    #[error("cocycle condition fails at ({0}, {1}, {2}, {3})")]
    NotCocycle(usize, usize, usize, usize),
    #[error("2-cocycle condition fails at ({0}, {1}, {2})")]
    NotTwoCocycle(usize, usize, usize),
    #[error("cocycle table has {got} entries, expected {expected}")]
    WrongSize { got: usize, expected: usize },
    #[error("cocycle is defined on group `{cocycle}` but `{group}` was supplied")]
    GroupMismatch { cocycle: String, group: String },
    #[error("rational lift of a cohomology class failed: {0}")]
    InconsistentLift(String),
    #[error("class vector {0:?} does not match the torsion coefficients")]
    BadClassVector(Vec<u64>),
}

#[derive(Debug, Error)]
pub enum ProjRepError {
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error("group of order {order} exceeds the character table bound {bound}")]
    OrderBoundExceeded { order: usize, bound: usize },
    #[error("character table failed exact verification: {0}")]
    LiftVerificationFailed(String),
}

#[derive(Debug, Error)]
pub enum ModularError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    ProjRep(#[from] ProjRepError),
    #[error("elements {0} and {1} do not commute")]
    NotCommuting(usize, usize),
    #[error("element {element} is not in the class of {representative}")]
    NotInClass { element: usize, representative: usize },
    #[error("element {h} does not centralize {y}")]
    NotCentralizing { y: usize, h: usize },
    #[error("the abelian shortcut needs an abelian group")]
    NotAbelian,
    #[error("galois conjugate row fits no position in the S matrix")]
    PlacementContradiction,
    #[error("fusion coefficient N[{i}][{j}][{k}] is not a nonnegative integer")]
    NonIntegralFusion { i: usize, j: usize, k: usize },
    #[error("matrix dimensions disagree: {0}")]
    Shape(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EquivalenceError {
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
}

#[derive(Debug, Error)]
pub enum DbError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Modular(#[from] ModularError),
    #[error("io error at {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("cannot parse {path}: {message}")]
    Parse { path: String, message: String },
    #[error("order {order} exceeds the limit {limit}{hint}")]
    OrderBoundExceeded { order: usize, limit: usize, hint: &'static str },
    #[error("no catalog of groups of order {0}")]
    NoCatalog(usize),
    #[error("class index {index} out of range ({count} orbit representatives)")]
    ClassOutOfRange { index: usize, count: usize },
    #[error("{0} jobs failed")]
    JobsFailed(usize),
    #[error("verification failed for {path}: {check}")]
    Verification { path: String, check: String },
}
