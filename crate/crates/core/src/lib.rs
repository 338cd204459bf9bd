//! Desk-scale computations around the value distribution of the Hurwitz
//! zeta-function ζ(s, α) for quadratic irrational α.

pub mod beurling_selberg;
pub mod cassels;
pub mod error;
pub mod experiments;
pub mod quad_field;
pub mod random_model;
pub mod zeta_numerics;

pub use error::{Error, Result};
