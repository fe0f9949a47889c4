//! Exact computation of transvectant invariants of n-ary forms and of natural
//! differential invariants of scalar linear (and ℚ(u)-nonlinear) differential
//! operators, with a sampling-based equivalence checker built on invariant
//! models.

pub mod error;
pub mod fnonlinear;
pub mod natinv;
pub mod catalog;
pub mod diffop;
pub mod domain;
pub mod poly;
pub mod transvect;

pub use error::{Error, Result};
