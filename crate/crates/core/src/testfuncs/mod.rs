//! Catalog of right-invariant test functions with closed-form homogeneous
//! extensions, and exact spectral oracles for the sphere.

mod catalog;
mod keys;
pub mod oracle;
pub mod quadrature;

pub use catalog::{make_test_function, ClosureFunction, FrameFunction, FunctionKind, InvariantFunction};
pub use keys::{parse_function_key, CATALOG_KEYS};
