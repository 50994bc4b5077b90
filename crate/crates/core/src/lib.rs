//! Exact computations for hypersurface singularities over prime fields:
//! Fedder's F-purity test, strong F-regularity certificates, F-signature and
//! Hilbert-Kunz estimators from colengths of Frobenius degeneracy ideals, and
//! the standard affine charts of the blowup at the origin.

pub mod blowup;
pub mod bracket;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod criteria;
pub mod error;
pub mod field;
pub mod invariants;
pub mod matrix;
pub mod parse;
pub mod poly;
pub mod rank;

pub use bracket::BracketSpace;
pub use config::Limits;
pub use error::{Error, Result};
pub use field::FieldSpec;
pub use matrix::FpMatrix;
pub use parse::{parse_poly, parse_vars};
pub use poly::{Monomial, SparsePolynomial};
pub use rank::{rank_fp, rank_of_power};
