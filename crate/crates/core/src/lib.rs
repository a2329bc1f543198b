//! Integral transforms on Stiefel and Grassmann manifolds, Siegel gamma
//! normalizations, Cayley-Laplace type differential operators and a
//! verification harness for the identities that connect them.

pub mod diffops;
pub mod error;
pub mod linalg;
pub mod mc;
pub mod manifolds;
pub mod rng;
pub mod special;
pub mod testfuncs;
pub mod transforms;
pub mod verify;

pub use error::{Error, Result};
