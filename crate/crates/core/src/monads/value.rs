use crate::exactnum::Rat;
use crate::finset::FinSet;

/// Per-monad representation of an element of `TX`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Payload {
    /// Identity monad: an element index.
    Point(usize),
    /// Distributions and (non-zero) measures: one weight per element.
    Weights(Vec<Rat>),
    /// Powerset monads: membership flags.
    Subset(Vec<bool>),
    /// Writer monad: a monoid element paired with a point.
    Tagged { tag: usize, point: usize },
    /// Free abelian group: signed multiplicities.
    Multiset(Vec<i64>),
}

/// An element of `TX` for some monad `T` and finite set `X`.
///
/// Values are only built through [`super::MonadInstance`], which checks the
/// instance invariants; equality is structural.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TValue {
    pub(super) base: FinSet,
    pub(super) payload: Payload,
}

impl TValue {
    pub fn base(&self) -> &FinSet {
        &self.base
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    pub fn weights(&self) -> Option<&[Rat]> {
        match &self.payload {
            Payload::Weights(w) => Some(w),
            _ => None,
        }
    }

    /// Total mass for measure-like payloads.
    pub fn total(&self) -> Option<Rat> {
        self.weights().map(|w| w.iter().sum())
    }

    /// True for the zero measure, the empty subset and the empty multiset.
    pub fn is_zero(&self) -> bool {
        match &self.payload {
            Payload::Weights(w) => w.iter().all(Rat::is_zero),
            Payload::Subset(s) => s.iter().all(|b| !b),
            Payload::Multiset(m) => m.iter().all(|&n| n == 0),
            Payload::Point(_) | Payload::Tagged { .. } => false,
        }
    }
}
