//! Sampling, geometry and Monte Carlo machinery for lower-tail experiments on
//! the smallest singular value of isotropic log-concave random matrices.
//!
//! The crate is `no_std` (with `alloc`). Every random quantity is a pure
//! function of a [`RandomSeed`], so experiments can be split across threads by
//! a host crate without changing their results.

#![no_std]

extern crate alloc;

pub mod ensembles;
pub mod error;
pub mod geometry;
pub mod linalg;
pub mod matrix;
pub mod montecarlo;
pub mod rng;

pub use ensembles::EnsembleSpec;
pub use error::{Error, Result};
pub use matrix::RealMatrix;
pub use rng::RandomSeed;
