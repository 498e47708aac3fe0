//! Error type shared by all modules.

use alloc::string::String;
use core::fmt;

/// Errors raised by configuration validation, linear algebra, and the
/// sweep engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A parameter is outside its documented domain (wrong bit count,
    /// non-power-of-two order, zero dimension, ...).
    InvalidParameter(String),
    /// `H·Hᴴ` has a reciprocal condition number below `1e-12`; the caller
    /// is expected to redraw the channel realization.
    SingularChannel,
    /// A rank or index lies outside its valid range.
    OutOfRange(String),
    /// A BER curve does not cross the requested target level.
    NotBracketed(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::SingularChannel => write!(f, "singular channel: HH^H is numerically not invertible"),
            Error::OutOfRange(msg) => write!(f, "out of range: {msg}"),
            Error::NotBracketed(msg) => write!(f, "target not bracketed: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
