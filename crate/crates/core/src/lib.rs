//! Dyadic paraproduct compositions `Π_b Π_d` on a finite tree.
//!
//! The operator norm is compared against the testing constants `A + B + C`;
//! the half-plane transplant reproduces the same Gram matrix up to a factor 2.

pub mod calibration;
pub mod campaign;
pub mod conditions;
pub mod dyadic;
pub mod error;
pub mod halfplane;
pub mod paraproducts;
pub mod symbols;

pub use dyadic::{DyadicIndex, GridFunction, HaarCoefficients, Half, Tree};
pub use error::{Error, Result};
pub use paraproducts::{composition_gram_closed, composition_gram_direct, operator_norm, NormMethod, OperatorMatrix};
pub use symbols::{generate, nu_table, Distribution, Symbol, SymbolKind, SymbolSpec};
