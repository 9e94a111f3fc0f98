//! Combinatorial topology workbench for the Lefschetz fibrations of (a,b,c) bidouble covers.
//!
//! Everything is exact integer arithmetic. Mapping classes are represented by their action
//! on the first homology of the fibre, braids by their action on integer lamination
//! coordinates of the punctured disk.

pub mod braid;
pub mod coxeter;
pub mod error;
pub mod factorization;
pub mod intmat;
pub mod invariants;
pub mod report;
pub mod surface;
pub mod twist;

pub use error::{Error, Result};
