//! Cumulants of the Berry phase for a cyclic parameter path.
//!
//! Three routes reach the same four numbers `C1..C4`: the discrete Bargmann
//! product ([`bargmann`]), continuum integrals of derivative expectations
//! ([`continuum`]), and moments of a commutator operator ([`operator`]).
//! [`polarization`] applies them to a Bloch band.

pub mod bargmann;
pub mod continuum;
mod error;
pub mod models;
pub mod numerics;
pub mod operator;
pub mod polarization;

pub use error::{Error, Result};
