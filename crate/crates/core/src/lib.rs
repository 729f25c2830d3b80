//! Minimal A∞-models of Ginzburg dg algebras of acyclic quivers, computed
//! exactly over the rationals, together with the preprojective, mesh and
//! translation algebras used to cross-check them.
//!
//! Paths are written source to target and `p·q` means "p then q".

#![no_std]

extern crate alloc;

pub mod algebra;
pub mod error;
pub mod ginzburg;
pub mod linalg;
pub mod mesh;
pub mod quiver;
pub mod transfer;
pub mod translation;

pub use error::{Error, Result};
pub use linalg::Rational;

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> alloc::vec::Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> alloc::vec::Vec<R> {
    items.iter().map(f).collect()
}
