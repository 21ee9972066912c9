use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller violated a precondition (model mismatch, bad range, ...).
    #[error("usage error: {0}")]
    Usage(String),

    /// An interior point came too close to the boundary sphere for `f64`.
    #[error("numerical overflow: {0}")]
    NumericalOverflow(String),

    #[error("resource limit: {limit} elements exceeded at word length {word_length}")]
    Resource { limit: usize, word_length: usize },

    #[error("no loxodromic element found up to word length {depth}; search deeper (the input may be elementary or parabolic-only)")]
    LoxodromicNotFound { depth: usize },

    #[error("degenerate basepoint: minimum displacement {0:e} is below tolerance; the basepoint is fixed by a nontrivial element")]
    DegenerateBasepoint(f64),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("sample under-resolves scale 2^-{k_max}: nearest-neighbour spacing {spacing:e}; enumerate deeper")]
    Resolution { k_max: u32, spacing: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// The innermost error, looking through stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
