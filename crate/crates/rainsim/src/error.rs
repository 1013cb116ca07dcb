use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the simulator and the experiment harness.
#[derive(Debug, Error)]
pub enum SimError {
    /// Invalid configuration, parameters, or input data.
    #[error("config error: {0}")]
    Config(String),

    /// A numerical guard tripped: unstable step size, non-finite state,
    /// quadrature that refuses to converge.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Filesystem failure, annotated with the path involved.
    #[error("io error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl SimError {
    /// Process exit code used by the CLI: 2 config, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::Config(_) => 2,
            SimError::Numerical(_) => 3,
            SimError::Io { .. } => 4,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SimError::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, SimError>;
