//! Noncommutative series toolkit: shuffle and half-shuffle algebras,
//! Lyndon words and the dual PBW families, factorizations of diagonal
//! series, infinitesimal-braid quotients, and numerical Chen series with
//! polylogarithms and the KZ equations on three and four points.

pub mod alphabet;
pub mod braid;
pub mod chen;
pub mod coeff;
pub mod diagonal;
pub mod error;
pub mod json;
pub mod lie_bases;
pub mod ncseries;

pub use alphabet::{Alphabet, Letter, Word};
pub use coeff::{Coeff, C64, Q};
pub use error::{Error, Result};
pub use ncseries::{LegProduct, NcPoly, TensorPoly, TruncatedSeries};
