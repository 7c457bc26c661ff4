use std::fmt;

use thiserror::Error;

/// 1-based line and column in an experiment description.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl Pos {
    pub fn new(line: usize, col: usize) -> Self {
        Self { line, col }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("sigma0 must be positive and finite, got {0}")]
    Sigma0(f64),
    #[error("gamma must be non-negative and finite, got {0}")]
    Gamma(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("{name} must be a non-negative finite number, got {value}")]
    Domain { name: &'static str, value: f64 },
    #[error("witness table is missing entry {0}")]
    MissingEntry(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DslError {
    #[error("{pos}: lexical error: {msg}")]
    Lex { pos: Pos, msg: String },
    #[error("{pos}: syntax error: expected {expected}, found {found}")]
    Syntax {
        pos: Pos,
        expected: String,
        found: String,
    },
    #[error("{pos}: {msg}")]
    Semantic { pos: Pos, msg: String },
    #[error("unknown builtin `{name}` (available: {available})")]
    UnknownBuiltin { name: String, available: String },
}

impl DslError {
    pub fn semantic(pos: Pos, msg: impl Into<String>) -> Self {
        DslError::Semantic {
            pos,
            msg: msg.into(),
        }
    }

    pub fn pos(&self) -> Option<Pos> {
        match self {
            DslError::Lex { pos, .. }
            | DslError::Syntax { pos, .. }
            | DslError::Semantic { pos, .. } => Some(*pos),
            DslError::UnknownBuiltin { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("conditioning predicate selected no trials out of {trials}")]
    DegenerateDenominator { trials: u64 },
    #[error("parameter `{0}` still holds a sweep; expand sweeps before running")]
    UnexpandedSweep(String),
    #[error("invalid experiment: {0}")]
    Invalid(String),
    #[error("mode `{0}` was read before being sourced")]
    UnsourcedMode(String),
    #[error("failed to start worker pool: {0}")]
    Pool(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Analytics(#[from] AnalyticsError),
    #[error(transparent)]
    Dsl(#[from] DslError),
    #[error(transparent)]
    Run(#[from] RunError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
