//! Monte Carlo estimators for the cosine, sine, Funk and intermediate transforms.
//!
//! Every estimator is a pure function of its inputs and a [`Stream`](crate::rng::Stream);
//! calling it twice with the same stream reuses the same draws, which is how
//! callers obtain common random numbers across evaluation points.

mod cosine;
mod estimate;
mod funk;
mod pairing;
mod sets;

pub use cosine::{
    complement_function, cosine_dual, cosine_dual_with, cosine_transform, cosine_transform_with, delta_factor,
    gamma_factor, normalized_cosine, normalized_cosine_dual, normalized_cosine_dual_tilted, normalized_cosine_dual_with, normalized_cosine_with, sine_integral, sine_integral_with,
    sine_transform, sine_transform_tilted, sine_transform_with, zeta_gaussian,
};
pub(crate) use cosine::finite_or_pole;
pub use estimate::{EstimateParams, TransformEstimate};
pub use funk::{
    a_km, funk_dual, funk_transform, funk_transform_rule, grassmann_radon, intermediate_funk, intermediate_funk_dual,
    intermediate_funk_grassmann, intermediate_funk_rule, RadonDirection,
};
pub use pairing::{duality_pairing, PairingKind};
pub use sets::{tilted_frame, AnchorLaw, AnchoredSet, SampleSet};
