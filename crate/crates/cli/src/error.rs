use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config parse error: {0}")]
    Parse(String),

    #[error("invalid configuration: {key}: {reason}")]
    Config { key: String, reason: String },

    #[error("io error: {0}")]
    Io(String),

    #[error("{}", describe(.0))]
    Core(#[from] trapcs_core::Error),
}

/// The core message, prefixed with the error name when it does not already start with it.
fn describe(e: &trapcs_core::Error) -> String {
    let msg = e.to_string();
    if msg.starts_with(e.name()) {
        msg
    } else {
        format!("{}: {msg}", e.name())
    }
}

impl CliError {
    /// Process exit status: 2 for configuration problems, 1 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Config { .. } => 2,
            CliError::Io(_) => 1,
            CliError::Core(trapcs_core::Error::Config { .. }) => 2,
            CliError::Core(_) => 1,
        }
    }
}
