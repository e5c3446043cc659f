//! Exit codes: 2 usage, 3 input/output, 4 numerical failure,
//! 5 postcondition check failed, 6 integration blow-up.

use deimkit::DeimError;

pub const USAGE: u8 = 2;
pub const IO: u8 = 3;
pub const NUMERIC: u8 = 4;
pub const POSTCONDITION: u8 = 5;
pub const BLOWUP: u8 = 6;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: USAGE,
            message: message.into(),
        }
    }

    pub fn io(e: impl std::fmt::Display) -> Self {
        Failure {
            code: IO,
            message: e.to_string(),
        }
    }
}

impl From<DeimError> for Failure {
    fn from(e: DeimError) -> Self {
        let code = match &e {
            DeimError::Io(_) | DeimError::Json(_) | DeimError::Parse { .. } => IO,
            DeimError::InvalidArgument(_) | DeimError::DimensionMismatch { .. } => USAGE,
            DeimError::IntegrationBlowup { .. } => BLOWUP,
            _ => NUMERIC,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::io(e)
    }
}
