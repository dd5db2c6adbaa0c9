//! Generalized relative entropies, their bounds under unitary evolution, and quantum speed limits.

// `!(x > 0.0)` guards reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod entropy;
pub mod error;
pub mod evolution;
pub mod hamiltonian;
pub mod linalg;
pub mod parallel;
pub mod qubit;
pub mod scan;
pub mod state;

pub use error::{Error, Result};
