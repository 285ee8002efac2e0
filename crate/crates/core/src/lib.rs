//! Combinatorics, exact moments and random-matrix experiments for the
//! k-extendibility hierarchy of bipartite quantum states.

pub mod combinatorics;
pub mod error;
pub mod extendibility;
pub mod moments;
pub mod rmt;

pub use error::{Error, Result};
