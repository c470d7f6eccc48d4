use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A diagram failed validation; `vertex` names the offending vertex.
    #[error("malformed diagram at {vertex}: {reason}")]
    Structure { vertex: String, reason: String },

    #[error("strand count mismatch: {left} vs {right}")]
    StrandMismatch { left: usize, right: usize },

    #[error("invalid enumeration request: {0}")]
    InvalidSpec(String),

    /// Generation or materialisation stopped at a configured cap.
    #[error("resource limit exceeded: {what} (cap {cap}, reached {partial})")]
    ResourceLimit {
        what: String,
        cap: usize,
        partial: usize,
    },

    /// A vector mentions a diagram that is not part of the ambient basis.
    #[error("vector outside ambient basis: {0}")]
    OutsideAmbient(String),

    #[error("{0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn structure(vertex: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Structure {
            vertex: vertex.into(),
            reason: reason.into(),
        }
    }
}
