//! Hypergeometric sums over finite fields whose monodromy is the exceptional
//! group `G2`, and the moment statistics that identify it.
//!
//! See the guide under `book/` for a walk through the modules.

pub mod analysis;
pub mod cache;
pub mod chars;
pub mod dft;
pub mod error;
pub mod ff;
pub mod group;
pub mod hyp;
pub mod moments;
pub mod sum;

pub use error::{Error, Result};

// the guide's snippets run as doctests
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/fields.md")]
    mod fields {}
    #[doc = include_str!("../../../book/src/characters.md")]
    mod characters {}
    #[doc = include_str!("../../../book/src/hypergeometric.md")]
    mod hypergeometric {}
    #[doc = include_str!("../../../book/src/moments.md")]
    mod moments {}
    #[doc = include_str!("../../../book/src/groups.md")]
    mod groups {}
    #[doc = include_str!("../../../book/src/analysis.md")]
    mod analysis {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
