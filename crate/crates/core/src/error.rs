use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate set {0:?} in family")]
    DuplicateSet(Vec<u32>),
    #[error("element {element} is outside the ground set 1..={n}")]
    BadElement { element: i64, n: u32 },
    #[error("set {set:?} has size {got}, expected {expected}")]
    BadSize { set: Vec<u32>, got: usize, expected: usize },
    #[error("ground sets differ: {left} vs {right}")]
    GroundMismatch { left: u32, right: u32 },
    #[error("{what} = {value} exceeds the limit {limit}")]
    TooLarge { what: &'static str, value: u64, limit: u64 },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("exact arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("interval length {length} invalid for n = {n} (need 1 <= length < n)")]
    BadLength { length: u32, n: u32 },
    #[error("result is not exhaustive")]
    NotExhaustive,
    #[error("counterexample: {0}")]
    Counterexample(String),
    #[error("unknown {kind} `{name}` (available: {available})")]
    Unknown { kind: &'static str, name: String, available: String },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
