//! Exact computations with operads, their algebras and functor calculus over a field.

pub mod algebra;
pub mod bar;
pub mod calculus;
pub mod chain;
pub mod linalg;
pub mod operad;
pub mod text;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("linear algebra: {0}")]
    Linalg(String),
    #[error("field mismatch: {0} vs {1}")]
    FieldMismatch(String, String),
    #[error("window: {0}")]
    Window(String),
    #[error("{0}")]
    Invalid(String),
    #[error("line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("category mismatch: {0}")]
    Category(String),
    #[error("unstable at max_p = {0}")]
    Unstable(i64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
