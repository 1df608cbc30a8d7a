use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Operands that do not belong to the same group or monoid.
    #[error("structural error: {0}")]
    Structural(String),

    /// A computation would exceed a configured size limit.
    #[error("resource cap exceeded: {what} needs {requested}, limit is {limit}")]
    ResourceCap {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    /// Malformed instance or element data. `path` names the offending field.
    #[error("invalid value at `{path}`: {message}")]
    Invalid { path: String, message: String },

    /// The operation's preconditions do not hold for this instance.
    #[error("unsupported instance: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }
}
