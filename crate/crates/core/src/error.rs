use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A configuration or constructor argument failed validation.
    #[error("invalid {field}: {message}")]
    Config { field: String, message: String },

    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("sector (l={l}, m={m}) not present in field")]
    MissingSector { l: u32, m: i32 },

    #[error("syntax error at offset {offset}: expected {}", expected.join(" or "))]
    Syntax { offset: usize, expected: Vec<String> },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("{what} did not converge: {detail}")]
    Convergence { what: String, detail: String },

    /// The admissibility condition fails: `q_c` reaches zero at `tau_star`.
    #[error("inadmissible initial data: m_c0^2 - 2 g(tau) reaches zero at tau* = {tau_star:.6e} (g = {g_at:.6e})")]
    Inadmissible { tau_star: f64, g_at: f64 },

    #[error("decay-fit window too short: {0}")]
    WindowTooShort(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Wraps an error with the name of the pipeline stage that produced it.
    pub fn in_stage(self, stage: &'static str) -> Self {
        match self {
            e @ Error::Stage { .. } => e,
            e => Error::Stage {
                stage,
                source: Box::new(e),
            },
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Stage { source, .. } => source.exit_code(),
            Error::Config { .. }
            | Error::Domain(_)
            | Error::MissingSector { .. }
            | Error::Syntax { .. }
            | Error::UnknownIdentifier { .. } => 2,
            Error::Inadmissible { .. } => 3,
            Error::Convergence { .. } | Error::WindowTooShort(_) => 4,
            Error::Io { .. } => 1,
        }
    }
}
