//! Finite-quotient workbench for double coset separability and the
//! behaviour of subgroup intersections under profinite closure.

pub mod arith;
pub mod budget;
pub mod error;
pub mod group;
pub mod gs;
pub mod modular;
pub mod profinite;
pub mod registry;
pub mod report;

pub use budget::Budget;
pub use error::{Error, Result};
