//! The gs-monoidal layer of a Kleisli category: kernels, the structural
//! copy/discard/swap morphisms, effects, mass and normalization.

mod effects;
mod kernel;
mod laws;

pub use effects::{
    effect_mul, equivalent, mass, normalize, scalar_action, try_effect_inverse, Effect, NoInverse, Normalized,
};
pub use kernel::{
    compose, drop_leading_unit, drop_trailing_unit, reindex, structural, tensor, tensor_all, Kernel, KERNEL_BUDGET,
};
pub use laws::check_gs_laws;
