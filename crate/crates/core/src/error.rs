use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u64),
    #[error("rows of unequal length")]
    RaggedRows,
    #[error("kernel has {count} vectors, above the enumeration cap of {cap}")]
    EnumerationTooLarge { count: u128, cap: u128 },
    #[error("solution count overflows u128")]
    CountOverflow,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuandleError {
    #[error("element {element} out of range for a quandle of order {order}")]
    OutOfRange { element: usize, order: usize },
    #[error("modulus must be at least 1")]
    ZeroModulus,
    #[error("operation table has {got} entries, expected {expected}")]
    TableSize { got: usize, expected: usize },
    #[error("table does not satisfy the quandle axioms: {0}")]
    NotAQuandle(String),
    #[error("map is not a quandle homomorphism: f({x}*{y}) != f({x})*f({y})")]
    NotAHomomorphism { x: usize, y: usize },
    #[error("endomorphism search exceeded its budget of {cap} nodes")]
    SearchBudgetExceeded { cap: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BraidError {
    #[error("braid needs at least {min} strands, got {got}")]
    TooFewStrands { min: usize, got: usize },
    #[error("generator s{generator} is not valid on {strands} strands")]
    GeneratorOutOfRange { generator: usize, strands: usize },
    #[error("cannot parse braid letter `{0}`")]
    BadLetter(String),
    #[error("cannot parse link spec `{0}`")]
    BadLinkSpec(String),
    #[error("state has length {got}, braid has {strands} strands")]
    StateLength { got: usize, strands: usize },
    #[error(transparent)]
    Quandle(#[from] QuandleError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColoringError {
    #[error("oracle would try {candidates} assignments, above the cap of {cap}")]
    OracleCapExceeded { candidates: u128, cap: u128 },
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CountingError {
    #[error("closed-form prediction needs an odd prime p, got {0}")]
    UnsupportedP(usize),
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(usize),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuiverError {
    #[error("endomorphism #{endo} sends coloring {coloring:?} to {image:?}, which is not a coloring")]
    ClosureViolation {
        endo: usize,
        coloring: Vec<usize>,
        image: Vec<usize>,
    },
    #[error("coloring set holds only a count; enumerate it before building a quiver")]
    NotEnumerated,
    #[error("endomorphism acts on a quandle of order {endo_order}, colorings use {modulus}")]
    OrderMismatch { endo_order: usize, modulus: usize },
    #[error("count prediction is ambiguous ({0}); compute the quiver instead")]
    Ambiguous(String),
    #[error("no closed form for N = {count} with p = {p}, n = {n}")]
    Unsupported { p: usize, n: usize, count: u128 },
    #[error("quiver invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Counting(#[from] CountingError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExportError {
    #[error("block collapsing is only available for DOT output")]
    CollapseRequiresDot,
    #[error("unknown export format `{0}`")]
    UnknownFormat(String),
    #[error("malformed document: {0}")]
    Malformed(String),
}
