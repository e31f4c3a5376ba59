//! Finite-dimensional workbench for compact quantum group actions.

pub mod error;
pub mod fdlin;
pub mod galois;
pub mod index;
pub mod action;
pub mod pbw;
pub mod qg;

pub use error::{Error, Result};
