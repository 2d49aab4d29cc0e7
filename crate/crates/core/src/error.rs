use thiserror::Error;

use crate::game::{ActionId, InfosetId, NodeId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GameError {
    #[error("node {0} does not exist")]
    DanglingNode(NodeId),
    #[error("no probability vector for reachable leader infoset {0}")]
    MissingLeaderStrategy(InfosetId),
    #[error("no follower choice for reachable infoset {0}")]
    MissingFollowerChoice(InfosetId),
    #[error("action {action} is not legal in infoset {infoset}")]
    IllegalAction { infoset: InfosetId, action: ActionId },
    #[error("infoset {0} does not exist")]
    UnknownInfoset(InfosetId),
    #[error("infoset {0} is not owned by the leader")]
    NotLeaderInfoset(InfosetId),
    #[error("state {0} has no owner")]
    Ownerless(NodeId),
    #[error("game is invalid: {0}")]
    Invalid(String),
    #[error("malformed game file: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DescriptorError {
    #[error("invalid descriptor field `{field}`: {reason}")]
    Field { field: &'static str, reason: String },
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("malformed descriptor file: {0}")]
    Format(String),
}

impl DescriptorError {
    pub(crate) fn field(field: &'static str, reason: impl Into<String>) -> Self {
        DescriptorError::Field {
            field,
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AfgError {
    #[error("auxiliary game state is terminal")]
    Terminal,
    #[error("auxiliary game state is not terminal")]
    NotTerminal,
    #[error("action {action} is not legal in infoset {infoset}")]
    IllegalAction { infoset: InfosetId, action: ActionId },
    #[error("auxiliary game exceeds {0} nodes")]
    GuardExceeded(u64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("iteration budget must be positive")]
    ZeroIterations,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("no feasible leader strategy was found")]
    NoFeasibleProfile,
    #[error("uct node {0} is terminal")]
    TerminalNode(usize),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Afg(#[from] AfgError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExactError {
    #[error("normal form too large: {rows} x {cols} exceeds {limit} cells, use property tests instead")]
    TooLarge { rows: u128, cols: u128, limit: u128 },
    #[error("linear program for column {0} failed numerically")]
    Numerical(usize),
    #[error("no follower column admits a feasible commitment")]
    NoFeasibleColumn,
    #[error("deadline reached")]
    Deadline,
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("too many follower strategies to enumerate ({0})")]
    GuardExceeded(u128),
    #[error("invalid campaign config: {0}")]
    Config(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Descriptor(#[from] DescriptorError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
