//! Lattice independence, adjoint matroids and combinatorial derived matroids.

pub mod adjoint;
pub mod bitset;
pub mod catalog;
pub mod cli;
pub mod derived;
pub mod error;
pub mod family;
pub mod gf;
pub mod iso;
pub mod lattice;
pub mod matroid;
pub mod nbb;
pub mod random;
pub mod repro;

pub use error::{Error, Result};
