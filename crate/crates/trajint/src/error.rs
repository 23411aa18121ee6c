//! Crate-wide error type.

use thiserror::Error;

use crate::tree::NodePath;

#[derive(Debug, Error)]
pub enum Error {
    #[error("path {0} does not identify a node of the tree")]
    InvalidPath(NodePath),

    #[error("path {0} is not a leaf at horizon {1}")]
    NotALeaf(NodePath, usize),

    #[error("node {0} is a leaf; an interior node is required")]
    LeafNode(NodePath),

    #[error("tree leaves sit at unequal depths; a uniform horizon is required")]
    NonUniformHorizon,

    #[error("interior node {0} has no children")]
    ChildlessInterior(NodePath),

    #[error("payoff table has no entry for leaf {0}")]
    MissingTableEntry(NodePath),

    #[error("leaf {leaf} does not extend conditioning node {node}")]
    OutsideConditioning { leaf: NodePath, node: NodePath },

    #[error("holding for node {holding} lies outside the portfolio window [{start}, {maturity})")]
    HoldingOutsideWindow {
        holding: NodePath,
        start: usize,
        maturity: usize,
    },

    #[error("portfolios must share a conditioning node; found {0} and {1}")]
    MismatchedConditioning(NodePath, NodePath),

    #[error("portfolio maturity {0} exceeds the tree horizon {1}")]
    MaturityBeyondHorizon(usize, usize),

    #[error("holding interval [{lo}, {hi}] must contain zero")]
    IntervalWithoutZero { lo: String, hi: String },

    #[error("lattice factors must satisfy d < {0} (and be positive)")]
    BadLatticeFactors(String),

    #[error("no finite hedge certificate exists: the computed value is {0}")]
    NoFiniteCertificate(String),

    #[error("a certificate cannot dominate an infinite payoff value at leaf {0}")]
    UnhedgeableInfinity(NodePath),

    #[error("payoff is not integrable: price gap at non-null node {0}")]
    NotIntegrable(NodePath),

    #[error("payoff family is not monotone between members {0} and {1}")]
    NotMonotone(usize, usize),

    #[error("empty payoff family")]
    EmptyFamily,

    #[error("contrarian step bound fails at node {node}: best one-step gain {gain} >= {bound}")]
    ContrarianBlocked {
        node: NodePath,
        gain: String,
        bound: String,
    },

    #[error("grid budget exceeded: {0} evaluations requested (limit {1})")]
    GridTooLarge(u64, u64),

    #[error("oracle instance too large: {0}")]
    OracleInstance(String),

    #[error("superposition enumeration budget exceeded: {0} tuples (limit {1})")]
    EnumerationBudget(u64, u64),

    #[error("no martingale measure exists for these increments")]
    NoFeasibleMeasure,

    #[error("model file: {0}")]
    Model(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
