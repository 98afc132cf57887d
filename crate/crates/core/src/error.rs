use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("a position needs at least one pile")]
    EmptyPosition,

    #[error("invalid coordinate {0:?}: expected a nonnegative integer below 2^64")]
    ParseCoordinate(String),

    #[error("dimension must be at least 1")]
    InvalidDimension,

    #[error("invalid exponent n={n}: {reason}")]
    InvalidExponent { n: u32, reason: &'static str },

    #[error("enumeration needs 2^{required} points, above the budget of 2^{limit}")]
    BudgetExceeded { required: u64, limit: u32 },

    #[error("cannot restrict to exponent {requested}: point set is bounded by 2^{bound}")]
    RestrictTooLarge { requested: u32, bound: u32 },

    #[error("axis {axis} out of range for dimension {d}")]
    AxisOutOfRange { axis: usize, d: usize },

    #[error("format {format} cannot encode {d}-dimensional data")]
    IncompatibleFormat { format: &'static str, d: usize },

    #[error("pile index {index} out of range for {piles} piles")]
    PileIndexOutOfRange { index: usize, piles: usize },

    #[error("pile {index} has {current} stones; new size {new_size} removes nothing")]
    MoveDoesNotReduce {
        index: usize,
        current: u64,
        new_size: u64,
    },

    #[error("it is not this player's turn")]
    WrongTurn,

    #[error("the game is already over")]
    TerminalGame,

    #[error("cannot start a game with every pile empty")]
    TerminalStart,

    #[error("invalid point set: {0}")]
    InvalidPointSet(String),

    #[error("malformed csv at line {line}: {reason}")]
    MalformedCsv { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Stable machine-readable identifier, shared by the HTTP API and the C ABI.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyPosition
            | Error::ParseCoordinate(_)
            | Error::InvalidDimension
            | Error::InvalidExponent { .. }
            | Error::RestrictTooLarge { .. }
            | Error::AxisOutOfRange { .. }
            | Error::IncompatibleFormat { .. }
            | Error::TerminalStart
            | Error::InvalidPointSet(_)
            | Error::MalformedCsv { .. } => "bad_request",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::PileIndexOutOfRange { .. } | Error::MoveDoesNotReduce { .. } => "illegal_move",
            Error::WrongTurn => "wrong_turn",
            Error::TerminalGame => "terminal_game",
            Error::Io(_) => "io_error",
        }
    }
}
