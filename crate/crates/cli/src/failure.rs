use std::fmt;
use std::path::Path;

/// Exit status for a usage error.
pub const EXIT_USAGE: i32 = 1;
/// Exit status for unreadable or inconsistent input data.
pub const EXIT_DATA: i32 = 2;
/// Exit status for a numerical failure inside the pipeline.
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_DATA,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        Failure::data(format!("{}: {err}", path.display()))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<proxemb::Error> for Failure {
    fn from(err: proxemb::Error) -> Self {
        let code = if err.is_numerical() {
            EXIT_NUMERICAL
        } else if matches!(err, proxemb::Error::Config(_)) {
            EXIT_USAGE
        } else {
            EXIT_DATA
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

pub type CliResult<T> = Result<T, Failure>;
