//! Coherent states of the hydrogen atom built on the light-cone picture of
//! the Coulomb problem: parabolic eigenfunctions, the coherent-state series
//! and its closed form, light-cone quadrature, closed-form moments,
//! fictitious-time evolution, and the SO(3,2) generators on a truncated
//! four-mode Fock space.

pub mod algebra;
pub mod basis;
pub mod cli;
pub mod coherent;
pub mod error;
pub mod geometry;
pub mod observables;
pub mod quadrature;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
