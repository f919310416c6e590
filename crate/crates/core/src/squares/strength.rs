use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::Result;
use crate::finset::{FinFun, FinSet};
use crate::gscat::drop_trailing_unit;
use crate::monads::{scalar_json, MonadInstance, TValue};

use super::{Mediation, Square};

fn strength_corners(inst: &MonadInstance, x: &FinSet, y: &FinSet) -> Result<Option<Vec<(usize, TValue)>>> {
    if !inst.is_enumerable() {
        return Ok(None);
    }
    let ys: Vec<TValue> = inst.enumerate(y)?.collect();
    Ok(Some((0..x.len()).flat_map(|i| ys.iter().map(move |q| (i, q.clone()))).collect()))
}

fn point_value_json(inst: &MonadInstance, x: &FinSet, (i, q): &(usize, TValue)) -> Value {
    json!([x.label(*i), inst.value_json(q)])
}

/// ```text
/// X×TY ──s──▶ T(X×Y)
///   │            │
///   π₁          Tπ₁
///   ▼            ▼
///   X ────η───▶ TX
/// ```
#[derive(Clone, Debug)]
pub struct StrongAffineSquare {
    inst: MonadInstance,
    x: FinSet,
    y: FinSet,
}

impl StrongAffineSquare {
    pub fn new(inst: &MonadInstance, x: &FinSet, y: &FinSet) -> Self {
        StrongAffineSquare { inst: inst.clone(), x: x.clone(), y: y.clone() }
    }

    pub fn with_sizes(inst: &MonadInstance, sizes: [usize; 2]) -> Self {
        Self::new(inst, &FinSet::numbered("X", "x", sizes[0]), &FinSet::numbered("Y", "y", sizes[1]))
    }

    fn xy(&self) -> FinSet {
        self.x.times(&self.y)
    }
}

impl Square for StrongAffineSquare {
    type Apex = (usize, TValue);
    type Right = TValue;
    type Down = usize;
    type Target = TValue;

    fn name(&self) -> String {
        format!("strong-affine:{}:{},{}", self.inst.id(), self.x.len(), self.y.len())
    }

    fn property(&self) -> String {
        "strength square over the unit is a pullback".into()
    }

    fn top(&self, (i, q): &Self::Apex) -> Result<TValue> {
        self.inst.strength(&self.x.element(*i)?, q)
    }

    fn left(&self, (i, _): &Self::Apex) -> Result<usize> {
        Ok(*i)
    }

    fn right(&self, t: &TValue) -> Result<TValue> {
        self.inst.map(&FinFun::projection(&self.xy(), &[0])?, t)
    }

    fn bottom(&self, i: &usize) -> Result<TValue> {
        self.inst.unit(&self.x, *i)
    }

    fn apexes(&self) -> Result<Option<Vec<Self::Apex>>> {
        strength_corners(&self.inst, &self.x, &self.y)
    }

    fn rights(&self) -> Result<Option<Vec<TValue>>> {
        if !self.inst.is_enumerable() {
            return Ok(None);
        }
        Ok(Some(self.inst.enumerate(&self.xy())?.collect()))
    }

    fn downs(&self) -> Result<Option<Vec<usize>>> {
        Ok(Some((0..self.x.len()).collect()))
    }

    /// `(x, 0)`, where the zero value exists.
    fn probe_apexes(&self) -> Vec<Self::Apex> {
        self.inst.zero(&self.y).map(|z| vec![(0, z)]).unwrap_or_default()
    }

    fn sample_apex(&self, rng: &mut ChaCha8Rng) -> Result<Self::Apex> {
        Ok((rng.random_range(0..self.x.len()), self.inst.sample(&self.y, rng)?))
    }

    fn sample_cone(&self, rng: &mut ChaCha8Rng) -> Result<(TValue, usize)> {
        let a = self.sample_apex(rng)?;
        Ok((self.top(&a)?, a.0))
    }

    /// The `x`-slice of `t`; `s(x, −)` has it as a left inverse, so a
    /// verified slice is the only mediator.
    fn mediate(&self, t: &TValue, i: &usize) -> Option<Result<Mediation<Self::Apex>>> {
        Some((|| {
            let Some(q) = self.inst.slice(t, &self.x, *i, &self.y)? else {
                return Ok(Mediation::Missing { reason: "slice is not a value of TY".into() });
            };
            if &self.inst.strength(&self.x.element(*i)?, &q)? == t {
                Ok(Mediation::Unique((*i, q)))
            } else {
                Ok(Mediation::Missing { reason: "t is not s(x, q) for any q".into() })
            }
        })())
    }

    fn apex_json(&self, a: &Self::Apex) -> Value {
        point_value_json(&self.inst, &self.x, a)
    }

    fn right_json(&self, t: &TValue) -> Value {
        self.inst.value_json(t)
    }

    fn down_json(&self, i: &usize) -> Value {
        json!(self.x.label(*i))
    }

    fn target_json(&self, t: &TValue) -> Value {
        self.inst.value_json(t)
    }
}

/// ```text
/// X×TY ─────s─────▶ T(X×Y)
///   │                  │
/// id×T(del)        T(id×del)
///   ▼                  ▼
/// X×T1 ─────s─────▶ T(X×1) ≅ TX
/// ```
#[derive(Clone, Debug)]
pub struct PositivitySquare {
    inst: MonadInstance,
    x: FinSet,
    y: FinSet,
}

impl PositivitySquare {
    pub fn new(inst: &MonadInstance, x: &FinSet, y: &FinSet) -> Self {
        PositivitySquare { inst: inst.clone(), x: x.clone(), y: y.clone() }
    }

    pub fn with_sizes(inst: &MonadInstance, sizes: [usize; 2]) -> Self {
        Self::new(inst, &FinSet::numbered("X", "x", sizes[0]), &FinSet::numbered("Y", "y", sizes[1]))
    }

    fn xy(&self) -> FinSet {
        self.x.times(&self.y)
    }

    fn mass(&self, q: &TValue) -> Result<TValue> {
        self.inst.map(&FinFun::to_unit(&self.y), q)
    }
}

impl Square for PositivitySquare {
    type Apex = (usize, TValue);
    type Right = TValue;
    type Down = (usize, TValue);
    type Target = TValue;

    fn name(&self) -> String {
        format!("positivity:{}:{},{}", self.inst.id(), self.x.len(), self.y.len())
    }

    fn property(&self) -> String {
        "strength square over discard is a pullback".into()
    }

    fn top(&self, (i, q): &Self::Apex) -> Result<TValue> {
        self.inst.strength(&self.x.element(*i)?, q)
    }

    fn left(&self, (i, q): &Self::Apex) -> Result<(usize, TValue)> {
        Ok((*i, self.mass(q)?))
    }

    fn right(&self, t: &TValue) -> Result<TValue> {
        self.inst.map(&FinFun::projection(&self.xy(), &[0])?, t)
    }

    fn bottom(&self, (i, a): &(usize, TValue)) -> Result<TValue> {
        let s = self.inst.strength(&self.x.element(*i)?, a)?;
        self.inst.map(&drop_trailing_unit(&self.x), &s)
    }

    fn apexes(&self) -> Result<Option<Vec<Self::Apex>>> {
        strength_corners(&self.inst, &self.x, &self.y)
    }

    fn rights(&self) -> Result<Option<Vec<TValue>>> {
        if !self.inst.is_enumerable() {
            return Ok(None);
        }
        Ok(Some(self.inst.enumerate(&self.xy())?.collect()))
    }

    fn downs(&self) -> Result<Option<Vec<(usize, TValue)>>> {
        strength_corners(&self.inst, &self.x, &FinSet::unit())
    }

    fn probe_apexes(&self) -> Vec<Self::Apex> {
        self.inst.zero(&self.y).map(|z| vec![(0, z)]).unwrap_or_default()
    }

    fn sample_apex(&self, rng: &mut ChaCha8Rng) -> Result<Self::Apex> {
        Ok((rng.random_range(0..self.x.len()), self.inst.sample(&self.y, rng)?))
    }

    fn sample_cone(&self, rng: &mut ChaCha8Rng) -> Result<(TValue, (usize, TValue))> {
        let a = self.sample_apex(rng)?;
        Ok((self.top(&a)?, self.left(&a)?))
    }

    fn mediate(&self, t: &TValue, (i, a): &(usize, TValue)) -> Option<Result<Mediation<Self::Apex>>> {
        Some((|| {
            let Some(q) = self.inst.slice(t, &self.x, *i, &self.y)? else {
                return Ok(Mediation::Missing { reason: "slice is not a value of TY".into() });
            };
            if &self.inst.strength(&self.x.element(*i)?, &q)? == t && &self.mass(&q)? == a {
                Ok(Mediation::Unique((*i, q)))
            } else {
                Ok(Mediation::Missing { reason: "no q with s(x, q) = t and T(del)(q) = a".into() })
            }
        })())
    }

    fn apex_json(&self, a: &Self::Apex) -> Value {
        point_value_json(&self.inst, &self.x, a)
    }

    fn right_json(&self, t: &TValue) -> Value {
        self.inst.value_json(t)
    }

    fn down_json(&self, (i, a): &(usize, TValue)) -> Value {
        json!([self.x.label(*i), scalar_json(&self.inst, a)])
    }

    fn target_json(&self, t: &TValue) -> Value {
        self.inst.value_json(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::Mode;
    use crate::squares::{check_commutes, check_pullback};

    #[test]
    fn measure_strong_affine_does_not_commute() {
        let sq = StrongAffineSquare::with_sizes(&MonadInstance::measure(), [1, 1]);
        let r = check_commutes(&sq, Mode::Randomized, 10, 0).unwrap();
        assert!(!r.passed());
        let w = r.witness.unwrap();
        assert_eq!(w["apex"], json!(["x1", {"monad": "M", "base": "Y", "entries": {}}]));
        let p = check_pullback(&sq, Mode::Randomized, 10, 0).unwrap();
        assert!(!p.passed());
        assert!(p.notes.iter().any(|n| n.contains("not evaluated")));
    }

    #[test]
    fn distribution_strong_affine_randomized() {
        let sq = StrongAffineSquare::with_sizes(&MonadInstance::distribution(), [2, 2]);
        let r = check_pullback(&sq, Mode::Randomized, 100, 4).unwrap();
        assert!(r.passed(), "{:?}", r.witness);
    }

    #[test]
    fn identity_squares_are_pullbacks() {
        let id = MonadInstance::identity();
        assert!(check_pullback(&StrongAffineSquare::with_sizes(&id, [2, 2]), Mode::Exhaustive, 0, 0).unwrap().passed());
        assert!(check_pullback(&PositivitySquare::with_sizes(&id, [2, 2]), Mode::Exhaustive, 0, 0).unwrap().passed());
    }

    #[test]
    fn positivity_commutes_for_measures() {
        let sq = PositivitySquare::with_sizes(&MonadInstance::measure(), [2, 2]);
        assert!(check_commutes(&sq, Mode::Randomized, 100, 9).unwrap().passed());
    }
}
