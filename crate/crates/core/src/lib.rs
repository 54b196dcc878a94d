//! Free nilpotent Lie algebras, their invariant symmetric forms, and the
//! quadratic Lie algebras obtained as quotients by form radicals.

pub mod autgroup;
pub mod error;
pub mod exactlin;
pub mod freenilp;
pub mod invforms;
pub mod lie;
pub mod paperbook;
pub mod quadratize;

pub use error::{Error, Result};
