use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A node id in the input is not below the node count.
    NodeOutOfRange {
        node: usize,
        n: usize,
    },
    SelfLoop {
        node: usize,
    },
    NotSquare {
        row: usize,
        len: usize,
        n: usize,
    },
    Asymmetric {
        i: usize,
        j: usize,
    },
    InvalidEntry {
        i: usize,
        j: usize,
        value: i64,
    },
    InvalidProbability {
        value: f64,
    },
    /// Two structures that must describe the same node set disagree in size.
    SizeMismatch {
        expected: usize,
        found: usize,
    },
    LabelOutOfRange {
        node: usize,
        label: u32,
        k: usize,
    },
    InvalidBlockCount {
        k: usize,
        n: usize,
    },
    EmptyBlock {
        block: usize,
    },
    InvalidSampleSize {
        n0: usize,
        n: usize,
    },
    NodeInSample {
        node: usize,
    },
    InvalidConfig(&'static str),
    EmptyGraph,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NodeOutOfRange { node, n } => {
                write!(f, "node id {node} out of range for {n} nodes")
            }
            Error::SelfLoop { node } => write!(f, "self-loop on node {node}"),
            Error::NotSquare { row, len, n } => {
                write!(f, "row {row} has {len} entries, expected {n}")
            }
            Error::Asymmetric { i, j } => {
                write!(f, "matrix is not symmetric at ({i}, {j})")
            }
            Error::InvalidEntry { i, j, value } => {
                write!(f, "entry {value} at ({i}, {j}) is not one of -1, 0, 1")
            }
            Error::InvalidProbability { value } => {
                write!(f, "probability {value} outside [0, 1]")
            }
            Error::SizeMismatch { expected, found } => {
                write!(f, "size mismatch: expected {expected}, found {found}")
            }
            Error::LabelOutOfRange { node, label, k } => {
                write!(
                    f,
                    "node {node} has block {label}, but only {k} blocks exist"
                )
            }
            Error::InvalidBlockCount { k, n } => {
                write!(f, "block count {k} invalid for {n} nodes")
            }
            Error::EmptyBlock { block } => write!(f, "block {block} is empty"),
            Error::InvalidSampleSize { n0, n } => {
                write!(f, "sample size {n0} invalid for {n} nodes")
            }
            Error::NodeInSample { node } => {
                write!(f, "node {node} belongs to the model's sample")
            }
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::EmptyGraph => f.write_str("graph has no nodes"),
        }
    }
}

impl core::error::Error for Error {}
