//! Coexisting multiuser MIMO energy transfer and point-to-point MIMO
//! information transmission.

// NaN-rejecting checks are written as `!(x > 0.0)` on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod cli;
pub mod error;
pub mod numerics;
pub mod oracle;
pub mod report;
pub mod sim;
pub mod validate;
pub mod wet;
pub mod wit;

pub use error::{Error, Result};
