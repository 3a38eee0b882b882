use thiserror::Error;

use crate::topology::{BasicOpen, Point};
use crate::tree::{Node, NodeOrRoot};

/// Errors raised by the tree, topology, separation, game and operator layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("value {value} occurs more than once; nodes must be injective")]
    DuplicateValue { value: u32 },

    #[error("{s} does not precede {t}")]
    NotComparable { s: NodeOrRoot, t: NodeOrRoot },

    #[error("{r} does not strictly precede {t}")]
    NotStrictlyBelow { r: NodeOrRoot, t: Node },

    #[error("node {node} is outside the interval of {open}")]
    OutOfInterval { node: Node, open: Box<BasicOpen> },

    #[error("point {point} is not in both {first} and {second}")]
    NotInBoth {
        point: Point,
        first: Box<BasicOpen>,
        second: Box<BasicOpen>,
    },

    #[error("points must be distinct, got {0} twice")]
    EqualPoints(Point),

    #[error("expected a nonempty set of points")]
    EmptySet,

    #[error("point {0} is not covered")]
    NotACover(Point),

    #[error("projection mismatch: {0}")]
    ProjectionMismatch(String),

    #[error("invalid fragment: {0}")]
    InvalidFragment(String),

    #[error("counterexample: {0}")]
    Counterexample(serde_json::Value),

    #[error("not a star sequence: no family separates {x} and {y}")]
    NotStar { x: String, y: String },

    #[error("no valid theta for {t} with sign {i} in open set {n}")]
    NoValidTheta { n: usize, t: Node, i: i8 },

    #[error("round budget of {rounds} exhausted with E-members still reachable")]
    RoundBudgetExceeded {
        rounds: usize,
        trace: Box<crate::game::DiagTrace>,
    },

    #[error("trace invalid at round {round}: {reason}")]
    TraceInvalid { round: usize, reason: String },

    #[error("function is identically zero")]
    ZeroFunction,

    #[error("operator vanishes at {0}")]
    ZeroAtPoint(Point),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
