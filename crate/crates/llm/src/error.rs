use std::ops::Range;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("template error: {0}")]
    Template(String),

    #[error("parse error at bytes {}..{}: {message}", span.start, span.end)]
    Parse { message: String, span: Range<usize> },

    #[error("authentication rejected (HTTP {status})")]
    Auth { status: u16 },

    #[error("request rejected (HTTP {status}): {body}")]
    Rejected { status: u16, body: String },

    #[error("transport failed after {attempts} attempts: {last}")]
    Exhausted { attempts: usize, last: String },

    #[error("malformed response payload: {0}")]
    Payload(String),

    #[error("no credential: set {0}")]
    Credential(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = LlmError> = std::result::Result<T, E>;
