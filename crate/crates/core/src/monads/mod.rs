//! Commutative monads on finite sets: the instance descriptor, its law
//! suite and the affine / weakly affine classifier.

mod classify;
mod instance;
mod json;
mod laws;
mod value;

pub use classify::{classify, scalar_json, Affinity, Classification};
pub use instance::{unit_square_collapse, MonadInstance, MonadKind, SamplerConfig, DEFAULT_BOUND};
pub use laws::{check_monad_laws, exhaustive_cost, EXHAUSTIVE_BUDGET};
pub use value::{Payload, TValue};
