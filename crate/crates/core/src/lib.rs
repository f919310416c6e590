//! Kleisli categories of commutative monads on finite sets.
//!
//! Every commutative monad `T` on finite sets makes its Kleisli category a
//! copy-discard (gs-monoidal) category. This crate builds those categories for
//! a fixed family of monads with exact arithmetic and checks their structure:
//!
//! - [`exactnum`]: rationals and finite commutative monoids;
//! - [`finset`]: the cartesian base category;
//! - [`monads`]: the monad instances, their law suite and classification
//!   into affine, weakly affine and neither;
//! - [`gscat`]: kernels, copy/discard structure, effects, mass and
//!   normalization;
//! - [`independence`]: marginals and conditional independence;
//! - [`squares`]: pullback checks for the associativity, strong-affinity and
//!   positivity squares, and the three-way weak-affinity harness.

pub mod error;
pub mod exactnum;
pub mod finset;
pub mod gscat;
pub mod independence;
pub mod monads;
pub mod report;
mod rng;
pub mod squares;

pub use error::{Error, Result};
pub use exactnum::{FiniteMonoid, Rat};
pub use finset::{product, Element, FinFun, FinSet};
pub use gscat::{Effect, Kernel};
pub use monads::{Affinity, MonadInstance, Payload, TValue};
pub use report::{CheckReport, Mode, Report, Verdict};
pub use rng::trial_rng;
pub use squares::{check_commutes, check_pullback, theorem_harness, Square};
