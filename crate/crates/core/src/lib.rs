//! Convex calculus of finite-dimensional monotone operators.
//!
//! Points live in the pair space `R^n × R^n` with the duality product
//! `<x, x*>`. The crate computes Fitzpatrick functions, S-functions and their
//! conjugates, monotone polars, ε-enlargements, and runs checks of the
//! classical identities between them on concrete operators.

// `!(a <= b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convexfn;
pub mod enlarge;
pub mod error;
pub mod fitz;
pub mod oned;
pub mod operator;
pub mod optim;
pub mod polar;
pub mod report;
pub mod space;
pub mod suite;
pub mod zoo;

pub use error::{Error, Result};
pub use operator::{FiniteGraph, OperatorSpec, Piece};
pub use space::{ExtReal, PairPoint, Vector, Window};
pub use report::{CheckReport, Status, Witness};
