//! Effects `X → I`, the scalar action on kernels, mass and normalization.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::finset::{FinFun, FinSet};
use crate::monads::{scalar_json, unit_square_collapse, MonadInstance, TValue};

use super::kernel::{compose, drop_leading_unit, tensor, Kernel};

/// A kernel into the monoidal unit, stored as one `T1` scalar per point.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Effect(Kernel);

impl Effect {
    pub fn new(k: Kernel) -> Result<Self> {
        if !k.cod().is_unit() {
            return Err(Error::TypeMismatch(format!("effect must land in I, not `{}`", k.cod())));
        }
        Ok(Effect(k))
    }

    /// The unit of the effect monoid.
    pub fn discard(inst: &MonadInstance, x: &FinSet) -> Self {
        Effect(Kernel::discard(inst, x))
    }

    /// The effect with the given scalar at every point.
    pub fn constant(inst: &MonadInstance, x: &FinSet, a: &TValue) -> Result<Self> {
        Effect::new(Kernel::new(inst, x, &FinSet::unit(), vec![a.clone(); x.len()])?)
    }

    pub fn kernel(&self) -> &Kernel {
        &self.0
    }

    pub fn into_kernel(self) -> Kernel {
        self.0
    }

    pub fn dom(&self) -> &FinSet {
        self.0.dom()
    }

    pub fn scalar(&self, x: usize) -> &TValue {
        self.0.column(x)
    }

    /// `{label: scalar}` in readable form.
    pub fn to_json(&self) -> Value {
        let inst = self.0.instance();
        Value::Object((0..self.dom().len()).map(|i| (self.dom().label(i), scalar_json(inst, self.scalar(i)))).collect())
    }
}

/// `ab = (I×I ≅ I) ∘ (a⊗b) ∘ copy`.
pub fn effect_mul(a: &Effect, b: &Effect) -> Result<Effect> {
    if a.dom() != b.dom() {
        return Err(Error::TypeMismatch(format!("effects on `{}` and `{}`", a.dom(), b.dom())));
    }
    let inst = a.0.instance();
    let k = compose(&tensor(&a.0, &b.0)?, &Kernel::copy(inst, a.dom()))?.post(&unit_square_collapse())?;
    Effect::new(k)
}

/// `a·f = (I×Y ≅ Y) ∘ (a⊗f) ∘ copy`.
pub fn scalar_action(a: &Effect, f: &Kernel) -> Result<Kernel> {
    if a.dom() != f.dom() {
        return Err(Error::TypeMismatch(format!("effect on `{}` acting on kernel from `{}`", a.dom(), f.dom())));
    }
    compose(&tensor(&a.0, f)?, &Kernel::copy(f.instance(), f.dom()))?.post(&drop_leading_unit(f.cod()))
}

/// `m_f = del ∘ f`.
pub fn mass(f: &Kernel) -> Effect {
    let k = f.post(&FinFun::to_unit(f.cod())).expect("discard applies to any codomain");
    Effect(k)
}

/// A point where an effect has no inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct NoInverse {
    pub point: usize,
    pub label: String,
    pub scalar: Value,
}

impl NoInverse {
    pub fn to_json(&self) -> Value {
        json!({ "point": self.label, "scalar": self.scalar })
    }
}

/// The inverse of `a` in the effect monoid, or the first point where the
/// scalar has no inverse. Found inverses are verified against `discard`.
pub fn try_effect_inverse(a: &Effect) -> Result<std::result::Result<Effect, NoInverse>> {
    let inst = a.0.instance();
    let mut cols = Vec::with_capacity(a.dom().len());
    for i in 0..a.dom().len() {
        match inst.scalar_inverse(a.scalar(i))? {
            Some(b) => cols.push(b),
            None => {
                return Ok(Err(NoInverse { point: i, label: a.dom().label(i), scalar: scalar_json(inst, a.scalar(i)) }))
            }
        }
    }
    let b = Effect::new(Kernel::new(inst, a.dom(), &FinSet::unit(), cols)?)?;
    if effect_mul(a, &b)? != Effect::discard(inst, a.dom()) {
        return Err(Error::InvariantViolation("pointwise scalar inverse is not an effect inverse".into()));
    }
    Ok(Ok(b))
}

/// `f = mass · n` with `n` discardable.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalized {
    pub mass: Effect,
    pub kernel: Kernel,
}

/// Splits `f` into its mass and its normalization, verifying both
/// `del ∘ n = del` and `mass·n = f`.
pub fn normalize(f: &Kernel) -> Result<Normalized> {
    let m = mass(f);
    let inv = match try_effect_inverse(&m)? {
        Ok(inv) => inv,
        Err(w) => return Err(Error::NotNormalizable { witness: w.to_json().to_string() }),
    };
    let n = scalar_action(&inv, f)?;
    if !n.is_discardable()? || scalar_action(&m, &n)? != *f {
        return Err(Error::InvariantViolation("normalization failed its postconditions".into()));
    }
    Ok(Normalized { mass: m, kernel: n })
}

/// The effect `a` with `a·f = g`, if there is one.
///
/// Candidate `a = m_f⁻¹ · m_g` is the only possibility when the action is
/// free, so one check decides.
pub fn equivalent(f: &Kernel, g: &Kernel) -> Result<Option<Effect>> {
    if f.dom() != g.dom() || f.cod() != g.cod() || f.instance() != g.instance() {
        return Err(Error::TypeMismatch("equivalence of kernels with different types".into()));
    }
    let inv = match try_effect_inverse(&mass(f))? {
        Ok(inv) => inv,
        Err(w) => return Err(Error::NotNormalizable { witness: w.to_json().to_string() }),
    };
    let a = effect_mul(&inv, &mass(g))?;
    Ok((scalar_action(&a, f)? == *g).then_some(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::Rat;
    use crate::monads::Payload;

    fn r(p: i64, q: i64) -> Rat {
        Rat::new(p, q)
    }

    fn scalar(inst: &MonadInstance, w: Rat) -> TValue {
        inst.weights(&FinSet::unit(), vec![w]).unwrap()
    }

    fn kernel_1(inst: &MonadInstance, y: &FinSet, w: Vec<Rat>) -> Kernel {
        let x = FinSet::numbered("X", "x", 1);
        Kernel::new(inst, &x, y, vec![inst.weights(y, w).unwrap()]).unwrap()
    }

    #[test]
    fn measure_effects_multiply_pointwise() {
        let m = MonadInstance::measure();
        let x = FinSet::numbered("X", "x", 1);
        let a = Effect::constant(&m, &x, &scalar(&m, r(2, 1))).unwrap();
        let b = Effect::constant(&m, &x, &scalar(&m, r(3, 1))).unwrap();
        assert_eq!(effect_mul(&a, &b).unwrap().scalar(0).weights().unwrap(), &[r(6, 1)]);
        assert_eq!(effect_mul(&a, &Effect::discard(&m, &x)).unwrap(), a);
    }

    #[test]
    fn powerset_effects_intersect() {
        let p = MonadInstance::powerset();
        let x = FinSet::numbered("X", "x", 3);
        let sub = |b: bool| p.value(&FinSet::unit(), Payload::Subset(vec![b])).unwrap();
        let mk =
            |bs: [bool; 3]| Effect::new(Kernel::new(&p, &x, &FinSet::unit(), bs.map(sub).to_vec()).unwrap()).unwrap();
        let ab = effect_mul(&mk([true, true, false]), &mk([true, false, true])).unwrap();
        assert_eq!(ab, mk([true, false, false]));
    }

    #[test]
    fn scalar_action_rescales() {
        let m = MonadInstance::measure();
        let y = FinSet::numbered("Y", "y", 1);
        let f = kernel_1(&m, &y, vec![r(3, 1)]);
        let a = Effect::constant(&m, f.dom(), &scalar(&m, r(2, 1))).unwrap();
        assert_eq!(scalar_action(&a, &f).unwrap().column(0).weights().unwrap(), &[r(6, 1)]);
        assert_eq!(scalar_action(&Effect::discard(&m, f.dom()), &f).unwrap(), f);
        let zero = Effect::constant(&m, f.dom(), &scalar(&m, Rat::zero())).unwrap();
        assert!(scalar_action(&zero, &f).unwrap().column(0).is_zero());
    }

    #[test]
    fn inverses() {
        let ms = MonadInstance::nonzero_measure();
        let x = FinSet::numbered("X", "x", 1);
        let half = Effect::constant(&ms, &x, &scalar(&ms, r(1, 2))).unwrap();
        let inv = try_effect_inverse(&half).unwrap().unwrap();
        assert_eq!(inv.scalar(0).weights().unwrap(), &[r(2, 1)]);

        let m = MonadInstance::measure();
        let zero = Effect::constant(&m, &x, &scalar(&m, Rat::zero())).unwrap();
        let w = try_effect_inverse(&zero).unwrap().unwrap_err();
        assert_eq!(w.scalar, json!("0"));

        let w3 = MonadInstance::parse("writer:Z3").unwrap();
        let x2 = FinSet::numbered("X", "x", 2);
        let tags = [1, 2].map(|t| w3.value(&FinSet::unit(), Payload::Tagged { tag: t, point: 0 }).unwrap());
        let a = Effect::new(Kernel::new(&w3, &x2, &FinSet::unit(), tags.to_vec()).unwrap()).unwrap();
        let b = try_effect_inverse(&a).unwrap().unwrap();
        assert_eq!(b.scalar(0).payload(), &Payload::Tagged { tag: 2, point: 0 });
        assert_eq!(b.scalar(1).payload(), &Payload::Tagged { tag: 1, point: 0 });
    }

    #[test]
    fn normalization_examples() {
        let ms = MonadInstance::nonzero_measure();
        let y = FinSet::numbered("Y", "y", 2);
        let f = kernel_1(&ms, &y, vec![r(1, 1), r(3, 1)]);
        let n = normalize(&f).unwrap();
        assert_eq!(n.mass.scalar(0).weights().unwrap(), &[r(4, 1)]);
        assert_eq!(n.kernel.column(0).weights().unwrap(), &[r(1, 4), r(3, 4)]);
        let again = normalize(&n.kernel).unwrap();
        assert_eq!(again.mass, Effect::discard(&ms, f.dom()));
        assert_eq!(again.kernel, n.kernel);

        let m = MonadInstance::measure();
        let z = kernel_1(&m, &y, vec![Rat::zero(), Rat::zero()]);
        assert!(matches!(normalize(&z), Err(Error::NotNormalizable { .. })));
    }

    #[test]
    fn equivalence_examples() {
        let ms = MonadInstance::nonzero_measure();
        let y = FinSet::numbered("Y", "y", 2);
        let f = kernel_1(&ms, &y, vec![r(1, 1), r(3, 1)]);
        let g = kernel_1(&ms, &y, vec![r(2, 1), r(6, 1)]);
        let h = kernel_1(&ms, &y, vec![r(2, 1), r(3, 1)]);
        assert_eq!(equivalent(&f, &g).unwrap().unwrap().scalar(0).weights().unwrap(), &[r(2, 1)]);
        assert_eq!(equivalent(&f, &h).unwrap(), None);
        assert_eq!(equivalent(&f, &f).unwrap().unwrap(), Effect::discard(&ms, f.dom()));
    }
}
