//! Workbench for finite polyadic set algebras: algebras of α-ary relations
//! with cylindrification and substitution operators, raw-table counterparts,
//! an equational axiom suite, atom structures and complex algebras, functional
//! dilations, and a complete-representation constructor with an independent
//! brute-force oracle. An ω-dimensional finite-support engine hosts the
//! identities that only hold with unboundedly many coordinates.

pub mod algebra;
pub mod error;
pub mod rng;
pub mod space;

pub use error::{PalgError, Result};
