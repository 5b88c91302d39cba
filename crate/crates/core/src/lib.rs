//! Indices of nilpotency of Hecke operators on modular forms mod `p`.
//!
//! The computational core is generic over a coefficient ring ([`ring::CoeffRing`]):
//! residues mod a runtime prime for everything that is decided mod `p`, and exact
//! integers (`i128` or big integers) for the characteristic-zero oracles.

pub mod arith;
pub mod basis;
pub mod error;
pub mod hecke;
pub mod nilpotency;
pub mod partitions;
pub mod report;
pub mod ring;
pub mod series;

pub use error::{Error, Result};

/// Truncated q-expansion over `F_p`.
pub type QSeries = series::Series<ring::Fp>;
/// Exact q-expansion with machine-width integer coefficients.
pub type ZSeries = series::Series<ring::Integers<i128>>;
/// Exact q-expansion with arbitrary-precision coefficients.
pub type BigSeries = series::Series<ring::Integers<num_bigint::BigInt>>;
