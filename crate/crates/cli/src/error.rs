use std::fmt;

/// Failure classes of a run, mapped one to one onto exit statuses.
#[derive(Debug)]
pub enum CliError {
    /// Bad config, flags or inputs; exit status 2.
    Validation(String),
    /// The numerics failed (divergence, vanishing denominators); exit status 3.
    Numeric(String),
}

impl CliError {
    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "validation error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

/// Wraps a library error with the config key it came from.
pub fn at(key: &str) -> impl Fn(mixweak::Error) -> CliError + '_ {
    move |e| {
        let msg = format!("{key}: {e}");
        if e.is_numeric() {
            CliError::Numeric(msg)
        } else {
            CliError::Validation(msg)
        }
    }
}
