use crate::game::{Agent, Mode};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid game at {field}: {message}")]
    InvalidGame { field: String, message: String },

    #[error("assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("agent {agent} is not degenerate; its J̇ boundary is not a pair of lines")]
    NotDegenerate { agent: Agent },

    #[error("agent {agent} is degenerate; no linearized boundary exists")]
    DegenerateAgent { agent: Agent },

    #[error("quadratic form for agent {agent} in mode {mode} is definite; no real boundary lines")]
    DefiniteForm { agent: Agent, mode: Mode },

    #[error("no consistent mode at phase {theta}: {detail}")]
    NoConsistentMode { theta: f64, detail: String },

    #[error("mode map is not periodic in phase")]
    NonPeriodicModeMap,

    #[error("trajectory completes {found} revolutions, at least one is required")]
    InsufficientRevolutions { found: usize },

    #[error("integration step too large: {0}")]
    StepTooLarge(String),

    #[error("chattering detected near t = {t}: {events} events within {window}")]
    Chattering { t: f64, x: [f64; 2], events: usize, window: f64 },

    #[error("invalid simulation config: {0}")]
    InvalidSimConfig(String),

    #[error("config error at {path}: {message}")]
    Config { path: String, message: String },

    #[error("unknown parameter path {0:?}")]
    UnknownParameter(String),

    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. }
            | Error::InvalidGame { .. }
            | Error::UnknownParameter(_)
            | Error::DegenerateGrid(_)
            | Error::InvalidSimConfig(_)
            | Error::Io(_) => 2,
            Error::AssumptionViolated(_)
            | Error::NotDegenerate { .. }
            | Error::DegenerateAgent { .. }
            | Error::DefiniteForm { .. }
            | Error::NoConsistentMode { .. }
            | Error::NonPeriodicModeMap
            | Error::InsufficientRevolutions { .. } => 3,
            Error::StepTooLarge(_) | Error::Chattering { .. } => 4,
        }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidGame { .. } => "invalid_game",
            Error::AssumptionViolated(_) => "assumption_violated",
            Error::NotDegenerate { .. } => "not_degenerate",
            Error::DegenerateAgent { .. } => "degenerate_agent",
            Error::DefiniteForm { .. } => "definite_form",
            Error::NoConsistentMode { .. } => "no_consistent_mode",
            Error::NonPeriodicModeMap => "non_periodic_mode_map",
            Error::InsufficientRevolutions { .. } => "insufficient_revolutions",
            Error::StepTooLarge(_) => "step_too_large",
            Error::Chattering { .. } => "chattering",
            Error::InvalidSimConfig(_) => "invalid_sim_config",
            Error::Config { .. } => "config",
            Error::UnknownParameter(_) => "unknown_parameter",
            Error::DegenerateGrid(_) => "degenerate_grid",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
