use std::path::PathBuf;

use thiserror::Error;

/// Everything that can end a CLI invocation early.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or flag combinations.
    #[error("{0}")]
    Usage(String),

    /// Malformed input file.
    #[error("{}: {}{message}", source_name, line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Parse {
        source_name: String,
        line: Option<u64>,
        message: String,
    },

    /// Quadrature could not be certified.
    #[error("{0}; a larger --grid-exponent usually helps")]
    Accuracy(oamfid_core::Error),

    /// Fringe fit failed or its data violate the fit preconditions.
    #[error("fit failed: {0}")]
    Fit(oamfid_core::Error),

    #[error("{0}")]
    Core(oamfid_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    /// A replayed run produced different bytes.
    #[error("{0}")]
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Parse { .. } => 3,
            Self::Accuracy(_) => 4,
            Self::Fit(_) => 5,
            Self::Core(_) | Self::Io { .. } | Self::Mismatch(_) => 1,
        }
    }

    pub fn parse(source_name: impl Into<String>, line: Option<u64>, message: impl Into<String>) -> Self {
        Self::Parse {
            source_name: source_name.into(),
            line,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<oamfid_core::Error> for CliError {
    fn from(e: oamfid_core::Error) -> Self {
        use oamfid_core::Error as E;
        match e {
            E::Domain(_) | E::Contract(_) => Self::Usage(e.to_string()),
            E::Accuracy { .. } => Self::Accuracy(e),
            E::NoConvergence { .. } | E::Rank(_) => Self::Fit(e),
            E::Degenerate(_) => Self::Core(e),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
