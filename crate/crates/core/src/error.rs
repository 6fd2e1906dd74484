use thiserror::Error;

/// Errors surfaced by the library. Invariant violations inside the
/// segment table are bugs and panic instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{value} lies outside {domain}")]
    Domain { value: String, domain: &'static str },

    #[error("invalid slope {input:?}: {reason}")]
    InvalidMu { input: String, reason: &'static str },

    #[error("cannot parse {input:?} as {what}")]
    Parse { input: String, what: &'static str },

    #[error("enumeration at n = {n} exceeds the cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(value: impl ToString, domain: &'static str) -> Self {
        Error::Domain {
            value: value.to_string(),
            domain,
        }
    }
}
