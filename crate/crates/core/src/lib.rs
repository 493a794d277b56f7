//! Numerical laboratory for composite waves (1-shock, contact, 3-shock) of the
//! one-dimensional compressible Navier-Stokes-Fourier system in Lagrangian
//! coordinates, with shift-coupled a-contraction diagnostics.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acontraction;
pub mod error;
pub mod gas;
pub mod interp;
pub mod lab;
pub mod nsf_solver;
pub mod ode;
pub mod par;
pub mod profiles;
pub mod riemann;

pub use error::{Error, Result};
