//! Free nilpotent Lie algebras over their Hall bases.

mod algebra;
mod hall;

pub use algebra::{AlgebraJson, FreeNilpotent, LieElement};
pub(crate) use algebra::format_combination;
pub use hall::{hall_basis, witt_dimension, HallWord};
