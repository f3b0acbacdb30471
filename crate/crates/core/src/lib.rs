//! Numerical soft-photon calculus for quantum electrodynamics.

pub mod action;
pub mod algebra;
pub mod chain;
pub mod current;
pub mod decomposition;
pub mod error;
pub mod extrapolate;
pub mod fock;
pub mod harness;
pub mod insertion;
pub mod jet;
pub mod quadrature;

pub use error::{Error, Result};
