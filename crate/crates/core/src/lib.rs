#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod brdf;
pub mod commands;
pub mod config;
pub mod counting;
pub mod envmap;
pub mod error;
pub mod grid;
pub mod math;
pub mod render;
pub mod validate;

pub use error::{Error, Result};
