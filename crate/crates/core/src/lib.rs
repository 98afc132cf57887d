//! Nim P-positions and the discrete Sierpinski demihypercube.
//!
//! The set of balanced Nim positions with `d` piles, viewed as lattice points,
//! is the same set as the discrete Sierpinski `d`-demihypercube. This crate
//! builds both sides independently, checks they agree, and ships an
//! optimal-play Nim engine with a CLI and a small HTTP API.

pub mod api;
pub mod cli;
pub mod engine;
pub mod error;
pub mod export;
pub mod fractal;
pub mod geometry;
pub mod nim;
pub mod verify;

pub use error::{Error, Result};
pub use fractal::{Budget, IterationSpec, PointSet};
pub use nim::{Classification, Move, Position};
