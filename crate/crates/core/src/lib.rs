//! Weight 3 paramodular cusp forms of prime level.
//!
//! The crate builds Gritsenko lifts of Jacobi theta blocks, expands
//! Borcherds products, restricts paramodular forms to modular curves and
//! reads off Hecke eigenvalues, and checks eigenvalue congruences in the
//! Hecke fields of the lift space.

pub mod borcherds;
pub mod data;
pub mod error;
pub mod eulerfactor;
pub mod exactcore;
pub mod jacobi;
pub mod numberfield;
pub mod paramodular;
pub mod restrict;

pub use error::{Error, Result};
