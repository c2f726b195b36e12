use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid MDP: {0}")]
    InvalidMdp(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A configuration field failed validation. `field` is a JSON path such as
    /// `agents[1].kind`.
    #[error("invalid config at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("policy row has zero entries; KL step needs full support")]
    DegenerateSupport,

    #[error("log too short: need at least {needed} episodes, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("runs are not comparable: {0}")]
    Mismatch(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Short machine-readable tag used by the CLI's JSON error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension(_) => "dimension",
            Error::InvalidMdp(_) => "invalid_mdp",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::Config { .. } => "config",
            Error::DegenerateSupport => "degenerate_support",
            Error::TooShort { .. } => "too_short",
            Error::MissingData(_) => "missing_data",
            Error::Mismatch(_) => "mismatch",
            Error::Io { .. } => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
