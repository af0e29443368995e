//! Numerical laboratory for radial Yamabe soliton profiles and fast-diffusion
//! self-similar solutions.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod cli;
pub mod config;
pub mod error;
pub mod export;
pub mod geometry;
pub mod integrator;
pub mod numeric;
pub mod params;
pub mod profile;
pub mod sweep;

pub use error::{Error, Result};
