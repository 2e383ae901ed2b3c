//! Finite-volume solvers for ultra-relativistic Euler and Navier-Stokes flows
//! built on the Anderson-Witting kinetic model.

pub mod config;
pub mod error;
pub mod grid;
pub mod io;
pub mod kinetic;
pub mod navier_stokes;

pub use error::{Error, Result};
pub mod flux;
pub mod problems;
pub mod reconstruction;
pub mod riemann;
pub mod solver;
