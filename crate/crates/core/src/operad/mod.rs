//! Symmetric sequences, truncated reduced operads, decorated trees and free constructions.

pub mod core;
pub mod free;
pub mod parse;
pub mod perm;
pub mod symseq;
pub mod tree;

pub use self::core::{builtin_operad, Operad};
pub use parse::{parse_operad, parse_operad_unchecked, write_operad};
pub use symseq::{Component, SymSeq};
