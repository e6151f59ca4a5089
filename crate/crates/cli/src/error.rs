use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input: exit code 2.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// A library invariant broke while checking: exit code 1.
    #[error("internal consistency failure: {0}")]
    Consistency(String),
}

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Invalid(msg.into())
    }

    /// Library errors are input problems, except broken cross-checks.
    pub fn from_core(e: hypercourant::Error) -> Self {
        match e {
            hypercourant::Error::Consistency(m) => CliError::Consistency(m),
            hypercourant::Error::Precondition { what, report } => {
                let detail = report
                    .map(|r| {
                        let failed: Vec<String> = r.failures().map(|v| v.id.clone()).collect();
                        format!(" (failing: {})", failed.join(", "))
                    })
                    .unwrap_or_default();
                CliError::Invalid(format!("precondition failed: {what}{detail}"))
            }
            other => CliError::Invalid(other.to_string()),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Consistency(_) => 1,
            _ => 2,
        }
    }
}
