//! Certified numerics for the Brjuno function `Φ`, its integral `Ψ`, and the
//! continued-fraction cells they are built from.

pub mod brjuno;
pub mod cells;
pub mod cf;
pub mod enclosure;
pub mod error;
pub mod experiments;
pub mod psi;
pub mod rational;
pub mod sample;

pub use enclosure::{Dir, Dyadic, Enclosure, DEFAULT_PRECISION};
pub use error::{Error, Result};
pub use rational::Rational;
