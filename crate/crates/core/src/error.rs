use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A `2^|M|` enumeration was requested above the configured cap.
    #[error("{operation} enumerates all subsets of {attributes} attributes, above the cap of {cap}{hint}")]
    Capacity {
        operation: &'static str,
        attributes: usize,
        cap: usize,
        hint: &'static str,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The oracles handed to the learner contradict each other.
    #[error("oracle protocol violation on counterexample {counterexample}: {message}")]
    Protocol { counterexample: String, message: String },

    #[error("corpus generation gave up after {attempts} attempts ({accepted} of {wanted} contexts accepted)")]
    GenerationExhausted {
        attempts: usize,
        accepted: usize,
        wanted: usize,
    },

    #[error("{0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}

/// Largest `|M|` for which any `2^|M|` scan is attempted by default.
pub const DEFAULT_ENUMERATION_CAP: usize = 24;

pub(crate) fn check_cap(operation: &'static str, attributes: usize, cap: usize) -> Result<()> {
    check_cap_hint(operation, attributes, cap, "")
}

pub(crate) fn check_cap_hint(
    operation: &'static str,
    attributes: usize,
    cap: usize,
    hint: &'static str,
) -> Result<()> {
    // Scans index subsets with u64 ranks.
    if attributes > cap || attributes > 63 {
        Err(Error::Capacity {
            operation,
            attributes,
            cap,
            hint,
        })
    } else {
        Ok(())
    }
}
