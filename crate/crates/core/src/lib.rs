//! Computable Scott-sentence components for finitely presented structures:
//! bounded automorphism-orbit search, the Π₁ orbit formula, and concrete
//! structures (graph products of cyclic groups, ℤⁿ, free groups, the free
//! projective plane of rank 4) with independent brute-force oracles.

pub mod classical;
pub mod config;
pub mod error;
pub mod graph_product;
pub mod group;
pub mod logic;
pub mod orbit;
pub mod plane;
pub mod scott;
pub mod structure;

pub use error::{Error, Result};
