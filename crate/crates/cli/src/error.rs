use std::fmt;

use serde::Serialize;

pub const EXIT_RUNTIME: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug)]
pub enum CliError {
    /// Bad flag, bad flag value or invalid configuration.
    Usage { flag: Option<String>, message: String },
    /// Failure after validation succeeded.
    Runtime(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn usage(flag: &str, message: impl fmt::Display) -> Self {
        CliError::Usage { flag: Some(flag.to_string()), message: format!("{flag}: {message}") }
    }

    pub fn runtime(message: impl fmt::Display) -> Self {
        CliError::Runtime(message.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage { .. } => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Diagnostic<'a> {
            error: &'a str,
            flag: Option<&'a str>,
            message: &'a str,
        }
        let d = match self {
            CliError::Usage { flag, message } => Diagnostic { error: "usage", flag: flag.as_deref(), message },
            CliError::Runtime(message) => Diagnostic { error: "runtime", flag: None, message },
        };
        serde_json::to_string(&d).expect("diagnostic serialises")
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage { message, .. } | CliError::Runtime(message) => f.write_str(message),
        }
    }
}

/// Tags a library error with the flag whose value caused it.
pub trait FlagContext<T> {
    fn flag(self, flag: &str) -> CliResult<T>;
}

impl<T, E: fmt::Display> FlagContext<T> for Result<T, E> {
    fn flag(self, flag: &str) -> CliResult<T> {
        self.map_err(|e| CliError::usage(flag, e))
    }
}

/// Runs after validation, so any library error is a runtime failure.
pub trait RuntimeContext<T> {
    fn runtime(self) -> CliResult<T>;
}

impl<T> RuntimeContext<T> for ppl_core::Result<T> {
    fn runtime(self) -> CliResult<T> {
        self.map_err(CliError::runtime)
    }
}
