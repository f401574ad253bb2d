// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod energy;
pub mod error;
pub mod grid;
pub mod lab;
pub mod linalg;
pub mod monotone;
pub mod output;
pub mod problem;
pub mod stepper;

pub use error::{Error, Result};
