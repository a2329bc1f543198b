//! The Cayley-Laplace operator, its powers, and analytic continuation by order reduction.

mod apply;
mod fd;
mod field;
mod inversion;
pub mod jet;
mod kernel;
mod lambda;
mod operator;

pub use apply::{
    apply_diffop, cross_validate, Backend, CompiledOp, CosineKernel, Extension, GramPower, MatrixFunction, SineKernel,
    CROSS_RTOL,
};
pub use fd::{build_stencil, richardson_weights, Stencil};
pub use field::{anchored_moments, Prepared};
pub use inversion::{invert_intertwining, invert_local, invert_nonlocal, sine_via_intermediate, Intertwining, InversionSetup};
pub use jet::{Jet, JetSpace};
pub use kernel::{kernel_diff_cosine_dual, kernel_diff_sine, kernel_diff_sine_cross, kernel_diff_sine_many, SineMode, INTEGRABILITY_MARGIN};
pub use lambda::{delta_lambda_ell, quarter_factor, ExtensionPoint};
pub use operator::{cayley_laplace_expand, gram_det, DiffOperator, DiffTerm, MAX_M_ELL};
