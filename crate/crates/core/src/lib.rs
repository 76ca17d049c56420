//! Finite-length polar codes, stopping-set analysis of their factor graph,
//! and a polar/LDPC concatenated FEC pipeline with a Monte Carlo harness.

pub mod channels;
pub mod concat;
pub mod decoders;
pub mod error;
pub mod factor_graph;
pub mod ldpc;
pub mod polar;
pub mod seeding;
pub mod sim;

pub use error::{Error, Result};
