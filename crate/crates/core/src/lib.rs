pub mod coupling;
pub mod error;
pub mod exact;
pub mod kernels;
pub mod lattice;
pub mod potential;
pub mod stream;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    pub mod intro {}
    #[doc = include_str!("../../../book/src/states.md")]
    pub mod states {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    pub mod kernels {}
    #[doc = include_str!("../../../book/src/potentials.md")]
    pub mod potentials {}
    #[doc = include_str!("../../../book/src/exact.md")]
    pub mod exact {}
    #[doc = include_str!("../../../book/src/coupling.md")]
    pub mod coupling {}
    #[doc = include_str!("../../../book/src/bounds.md")]
    pub mod bounds {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
