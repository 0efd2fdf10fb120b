//! Exact arithmetic for constructing and checking generators of SL2 over S-integers.

pub mod arith;
pub mod error;
pub mod field;
pub mod filtration;
pub mod generators;
pub mod ideal;
pub mod linalg;
pub mod poly;
pub mod quadratic;
pub mod residue;
pub mod serde_rat;
pub mod sunits;
pub mod verify;

pub use error::{Error, Result};
pub use field::{FieldElement, NumberField};
