use thiserror::Error;

use crate::rat::Rat;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} lies outside {domain}")]
    OutOfDomain {
        what: &'static str,
        value: String,
        domain: &'static str,
    },

    #[error("level {level} exceeds the truncation depth n_max = {n_max}")]
    LevelOutOfRange { level: usize, n_max: usize },

    #[error("level {level} has {count} cells, more than fit in a 64-bit index")]
    LevelTooFine { level: usize, count: String },

    #[error("{what} needs {required} items, over the budget of {budget}")]
    BudgetExceeded {
        what: &'static str,
        required: String,
        budget: u64,
    },

    #[error("tail of {what} is not certifiable: {reason}")]
    NotCertifiable { what: &'static str, reason: String },

    #[error("sqrt precision of {bits} bits is too coarse: {reason}")]
    Precision { bits: u32, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn out_of_domain(what: &'static str, value: &Rat, domain: &'static str) -> Self {
        Error::OutOfDomain {
            what,
            value: crate::rat::fmt_rat(value),
            domain,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
