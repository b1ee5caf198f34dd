use alloc::string::String;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain where the model is defined.
    #[error("domain error in {what}: {detail}")]
    Domain { what: &'static str, detail: String },
    /// The result would overflow `f64`.
    #[error("range error in {what}: {detail}")]
    Range { what: &'static str, detail: String },
    /// An iterative method or fit failed.
    #[error("fit error in {what}: {detail}")]
    Fit { what: &'static str, detail: String },
    /// A numerical procedure produced an unusable result.
    #[error("numerical error in {what}: {detail}")]
    Numerical { what: &'static str, detail: String },
    /// Inputs are mutually inconsistent (e.g. violate energy conservation).
    #[error("consistency error in {what}: {detail}")]
    Consistency { what: &'static str, detail: String },
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! err {
    ($kind:ident, $what:expr, $($arg:tt)*) => {
        $crate::Error::$kind { what: $what, detail: alloc::format!($($arg)*) }
    };
}
pub(crate) use err;
