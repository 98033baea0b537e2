use alloc::string::String;
use core::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Malformed input: bad dimensions, a face map that is not a face, a
    /// disconnected graph, and so on.
    Structural(String),
    /// The request is well formed but outside what the library computes
    /// (for example a Hilbert basis of a rank 4 non-unimodular cone).
    Capability(String),
    /// An argument violates the operation's precondition.
    Argument(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Structural(m) => write!(f, "structural error: {m}"),
            Error::Capability(m) => write!(f, "capability error: {m}"),
            Error::Argument(m) => write!(f, "argument error: {m}"),
        }
    }
}

macro_rules! structural {
    ($($t:tt)*) => { $crate::Error::Structural(alloc::format!($($t)*)) };
}
macro_rules! capability {
    ($($t:tt)*) => { $crate::Error::Capability(alloc::format!($($t)*)) };
}
macro_rules! argument {
    ($($t:tt)*) => { $crate::Error::Argument(alloc::format!($($t)*)) };
}
pub(crate) use {argument, capability, structural};
