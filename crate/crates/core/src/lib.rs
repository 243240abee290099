#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ansatz;
pub mod circuit;
pub mod error;
pub mod evolver;
pub mod hydrogen;
pub mod oracle;
pub mod pauli;
pub mod problems;

pub use error::{Error, Result};
