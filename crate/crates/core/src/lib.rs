//! Compile determinantal and Pfaffian point-process kernels into fermionic circuits built from
//! Givens rotations, simulate them exactly, and cross-check the samples against closed-form
//! probabilities and classical samplers.
//!
//! The linear algebra, schedulers and statevector are generic over `f32`/`f64`; the aliases
//! below fix the double-precision instances that the rest of the crate uses.

pub mod bogoliubov;
pub mod circuit;
pub mod error;
pub mod experiments;
pub mod fock_simulator;
pub mod io;
pub mod kernels;
pub mod numerics;
pub mod qr_engine;
pub mod rng;
pub mod samplers;
pub mod subset;

pub use error::{Error, Result};

pub type Matrix = numerics::ComplexMatrix<f64>;
pub type Matrix32 = numerics::ComplexMatrix<f32>;
pub type C64 = numerics::Complex<f64>;
pub type Rotation = numerics::GivensRotation<f64>;
