use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("duplicate category id {0:?}")]
    DuplicateId(String),
    #[error("negative count {value} for category {id:?}")]
    NegativeCount { id: String, value: i64 },
    #[error("all margins zero")]
    AllMarginsZero,
    #[error("category index {index} out of range for {k} categories")]
    IndexOutOfRange { index: usize, k: usize },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("size mismatch: expected {expected} categories, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("unknown metric {0:?}")]
    UnknownMetric(String),
    #[error("metric {metric} does not apply to {items}")]
    MetricNotApplicable { metric: &'static str, items: &'static str },
    #[error("items {0} and {1} are identical; categories must be distinct")]
    DuplicateItem(usize, usize),
    #[error("distance matrix is not square ({rows} rows, row {row} has {len} entries)")]
    NotSquare { rows: usize, row: usize, len: usize },
    #[error("asymmetric distance matrix at ({i}, {j}): {a} vs {b}")]
    Asymmetric { i: usize, j: usize, a: f64, b: f64 },
    #[error("negative entry {value} at ({i}, {j})")]
    NegativeEntry { i: usize, j: usize, value: f64 },
    #[error("nonzero diagonal {value} at ({i}, {i})")]
    NonzeroDiagonal { i: usize, value: f64 },
    #[error("zero distance between distinct categories {i} and {j}")]
    ZeroOffDiagonal { i: usize, j: usize },
    #[error("non-finite entry at ({i}, {j})")]
    NonFinite { i: usize, j: usize },

    #[error("invalid edge ({u}, {v}) for {k} categories")]
    InvalidEdge { u: usize, v: usize, k: usize },
    #[error("graph is not a spanning tree on {k} categories")]
    NotSpanningTree { k: usize },
    #[error("number of {what} is {count}, exceeding cap {cap}")]
    CapExceeded {
        what: &'static str,
        count: String,
        cap: u64,
    },
    #[error("node subset of size {0} is too large for brute-force matching (max 16)")]
    SubsetTooLarge(usize),
    #[error("node subset of size {0} has odd size")]
    OddSubset(usize),
    #[error("{0} odd-count categories exceed the limit of 16")]
    TooManyOddCategories(usize),
    #[error("Cayley count requires m >= 1")]
    CayleyZero,

    #[error("group {0} is empty")]
    EmptyGroup(char),
    #[error("permutation moments need N >= 4, got {0}")]
    TooFewSubjects(usize),
    #[error("null variance is zero")]
    ZeroVariance,
    #[error("exact enumeration needs {0} assignments, over the limit of 1e6")]
    TooLarge(u128),

    #[error("degenerate sample: all values equal")]
    DegenerateSample,
    #[error("{0} ranked objects exceed the exact-enumeration limit of 8")]
    TooManyObjects(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
