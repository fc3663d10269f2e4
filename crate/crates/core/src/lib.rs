//! Numerical toolkit for generalized Morrey spaces, Stummel classes and
//! Fefferman-type inequalities.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::too_many_arguments)]

pub mod counterexample;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod growth;
pub mod inequalities;
pub mod maximal_bmo;
pub mod quadrature;
pub mod stummel;

pub use error::{Error, Result};
