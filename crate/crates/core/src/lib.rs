#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Zero-field NMR spin Hamiltonians and fault-tolerant resource estimates.

pub mod config;
pub mod constants;
pub mod error;
pub mod gqsp;
pub mod lcost;
pub mod oracle;
pub mod physest;
pub mod refmodels;
pub mod report;
pub mod spinham;
pub mod structio;

pub use error::{Error, Result};
