use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FanError {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("not an extension chain: {0}")]
    NotAChain(String),

    #[error("family too short: window needs K_{needed} but only {available} members are listed")]
    FamilyTooShort { needed: u64, available: usize },

    #[error("index {0} is not in the window")]
    NotInWindow(String),

    #[error("no window index has Cantor coordinate {0}")]
    UnknownCoordinate(String),

    #[error("uncertified: {0}")]
    Uncertified(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("window too shallow at step {step}: {detail}")]
    WindowTooShallow { step: usize, detail: String },

    #[error("no endpoint-free box found")]
    NoFreeBox,
}

pub type Result<T, E = FanError> = std::result::Result<T, E>;
