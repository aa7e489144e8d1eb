//! Exact Koszul duality engine for nonhomogeneous quadratic algebras.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod catalog;
pub mod complex;
pub mod deformation;
pub mod dgmod;
pub mod error;
pub mod functors;
pub mod linalg;
pub mod par;
pub mod quadratic;
pub mod selftest;
pub mod suite;

pub use error::{Error, Result};
pub use linalg::{Field, Matrix, Scalar};
