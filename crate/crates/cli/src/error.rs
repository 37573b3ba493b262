use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("key `{key}`: {message}")]
    Invalid { key: String, message: String },

    #[error("usage: {0}")]
    Usage(String),

    #[error("i/o error on {path}: {message}")]
    Io { path: String, message: String },

    /// A library error raised while a scenario ran.
    #[error("{0}")]
    Core(#[from] markovlab::Error),
}

impl CliError {
    pub fn invalid(key: &str, message: impl Into<String>) -> Self {
        Self::Invalid {
            key: key.to_string(),
            message: message.into(),
        }
    }

    /// 1 for failed scientific checks raised as errors, 2 for everything
    /// the user has to fix in the input or environment.
    pub fn exit_code(&self) -> u8 {
        use markovlab::Error as E;
        match self {
            Self::Core(E::Stability { .. } | E::BranchSingularity { .. } | E::Precondition { .. } | E::Numerical { .. }) => 1,
            Self::Core(E::Positivity { .. }) => 1,
            _ => 2,
        }
    }
}
