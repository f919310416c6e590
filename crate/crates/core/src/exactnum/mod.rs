//! Exact rationals and finite commutative monoids.

mod monoid;
mod rat;

pub use monoid::{
    assoc_square_is_pullback, cone_json, group_pullback_agreement, is_group, library, named, FiniteMonoid,
    GroupVerdict, MonoidCone, PullbackVerdict,
};
pub use rat::Rat;
