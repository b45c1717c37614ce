pub mod config;
pub mod eigensolve;
mod error;
pub mod kernels;
pub mod quadrature;
pub mod rankone;
pub mod scissor;
pub mod skeleton;
pub mod specfun;
pub mod verify;

pub use error::{Error, Result};
