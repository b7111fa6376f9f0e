//! Interpolated staggered quantum walk search on the two-dimensional torus.

pub mod cli;
pub mod error;
pub mod grid_state;
pub mod operators;
pub mod search;
pub mod secular;
pub mod spectra;

pub use error::{Error, Result};
