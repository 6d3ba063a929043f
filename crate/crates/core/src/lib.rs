//! Weighted Sobolev and Besov regularity on polyhedral cones.

pub mod advisor;
pub mod error;
pub mod experiments;
pub mod fieldio;
pub mod geometry;
pub mod jet;
pub mod linalg;
pub mod mesh;
pub mod models;
pub mod pencil;
pub mod wavelet;
pub mod weighted;

pub use error::{Error, Result};
