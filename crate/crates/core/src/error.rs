use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A coordinate outside the region where a warp profile is valid.
    #[error("coordinate {value} outside the valid domain [0, {limit})")]
    Domain { value: f64, limit: f64 },

    /// The warp vanishes at this coordinate, so polar coordinates degenerate.
    #[error("singular polar coordinate at {0}")]
    SingularCoordinate(f64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The radial field left the admissible region at a specific grid node.
    #[error("node {node}: {reason}")]
    NodeDomain { node: usize, reason: String },

    #[error("equilibrium solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("dynamics blew up at t = {time}: {reason}")]
    BlowUp { time: f64, reason: String },

    /// A configuration problem; `location` is `line N`, `--set key` or `config`.
    #[error("{location}: {message}")]
    Config { location: String, message: String },

    /// A self-check ran but its result is outside tolerance.
    #[error("verification failed: {0}")]
    Verification(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Short machine-readable tag used by the command-line front end.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain",
            Error::SingularCoordinate(_) => "singular",
            Error::InvalidInput(_) => "invalid-input",
            Error::NodeDomain { .. } => "node-domain",
            Error::NonConvergence { .. } => "non-convergence",
            Error::BlowUp { .. } => "blow-up",
            Error::Config { .. } => "config",
            Error::Verification(_) => "verification",
            Error::Io { .. } => "io",
        }
    }

    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::InvalidInput(_) => 2,
            Error::NonConvergence { .. } => 3,
            Error::BlowUp { .. } => 4,
            Error::Io { .. } => 5,
            Error::Verification(_) => 6,
            Error::Domain { .. } | Error::SingularCoordinate(_) | Error::NodeDomain { .. } => 7,
        }
    }
}
