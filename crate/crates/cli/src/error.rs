use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{key}: {msg}")]
    Invalid { key: String, msg: String },
    #[error(transparent)]
    Solver(#[from] ucfem::Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Check(String),
}

impl CliError {
    pub fn invalid(key: &str, msg: impl Into<String>) -> Self {
        CliError::Invalid { key: key.to_string(), msg: msg.into() }
    }

    /// 2 configuration, 3 solver or runtime, 4 failed self-test.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Invalid { .. } => 2,
            CliError::Solver(_) | CliError::Io { .. } => 3,
            CliError::Check(_) => 4,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            2 => "config",
            3 => "runtime",
            _ => "check",
        }
    }

    /// One machine-parsable line: `error code=<n> kind=<kind> msg=<text>`.
    pub fn line(&self) -> String {
        let msg = self.to_string().replace('\n', " ");
        format!("error code={} kind={} msg={}", self.exit_code(), self.kind(), msg)
    }
}
