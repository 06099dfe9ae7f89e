//! Numerical laboratory for time changes of the geodesic flow on the
//! genus-2 octagon surface.

pub mod boundary;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod forms;
pub mod fuchsian;
pub mod lie;
pub mod par;
pub mod quadrature;
pub mod reparam;
pub mod report;

pub use error::{Error, Result};
