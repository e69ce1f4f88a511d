//! Exact computation over small finite fields of the objects that govern
//! polynomial structure: strength/rank with decomposition certificates,
//! difference operators and multilinearizations, character-sum bias, and
//! Gowers uniformity norms — plus a reproducible experiment harness that
//! tabulates how derivative ranks bound the rank itself.

pub mod analytic;
pub mod calculus;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod field;
pub mod poly;
pub mod rank;

pub use error::{Error, Result};

// The guide's code blocks run as doctests, so the book in book/ cannot
// drift from the library.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/multilinear.md")]
    mod multilinear {}
    #[doc = include_str!("../../../book/src/gowers.md")]
    mod gowers {}
    #[doc = include_str!("../../../book/src/rank.md")]
    mod rank {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
