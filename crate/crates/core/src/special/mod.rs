//! Siegel gamma function, Bernstein polynomial and normalizing constants.

mod constants;
mod gamma;

pub use constants::{constant, cosine_mass, gaussian_zeta_moment, sine_mass, ConstParams, ConstantKind};
pub use gamma::{bernstein_poly, ln_siegel_gamma, siegel_gamma, MeroValue};
pub(crate) use constants::{base as check_base, intermediate as check_intermediate, require};
#[allow(unused_imports)]
pub(crate) use gamma::nonpositive_integer;
