//! Product-quotient varieties: group actions on products of curves, their
//! singularities and invariants, and the fundamental group of the quotient.

mod error;
pub mod fermat;
pub mod finite_group;
pub mod orbifold;
pub mod pi1;
pub mod product_quotient;

pub use error::{Error, Result};
