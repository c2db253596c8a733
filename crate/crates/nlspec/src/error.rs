//! Error type of the std layer and its mapping to process exit codes.

use std::path::PathBuf;

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed input file, flag or configuration.
    #[error("bad input: {0}")]
    Input(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// A path solver stopped before reaching tolerance.
    #[error("{0}")]
    Solver(nlspec_core::Error),
    /// One or more self checks failed.
    #[error("verification failed: {0}")]
    Verification(String),
    /// The input hash recorded in a manifest differs from the given input.
    #[error("manifest mismatch: {0}")]
    ManifestMismatch(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 0 ok, 1 verification failure, 2 bad input or configuration,
    /// 3 solver failure, 4 manifest mismatch.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Input(_) | CliError::Io { .. } => 2,
            CliError::Solver(_) => 3,
            CliError::ManifestMismatch(_) => 4,
        }
    }
}

impl From<nlspec_core::Error> for CliError {
    fn from(e: nlspec_core::Error) -> Self {
        match e {
            nlspec_core::Error::Solver { .. } => CliError::Solver(e),
            other => CliError::Input(other.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_error_class() {
        let solver = nlspec_core::Error::Solver {
            step: Some(3),
            iterations: 10,
            residual: 1.0,
        };
        let e = CliError::from(solver);
        assert_eq!(e.exit_code(), 3);
        assert!(e.to_string().contains("step 3"));
        assert_eq!(CliError::from(nlspec_core::Error::NonFinite).exit_code(), 2);
        assert_eq!(CliError::Verification(String::new()).exit_code(), 1);
        assert_eq!(CliError::ManifestMismatch(String::new()).exit_code(), 4);
    }
}
