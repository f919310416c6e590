use rand::Rng;
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::exactnum::FiniteMonoid;
use crate::finset::{FinFun, FinSet};
use crate::monads::{MonadInstance, MonadKind, TValue};

/// A Kleisli morphism `dom → cod`: one value of `T(cod)` per element of `dom`.
///
/// Equality is structural on the canonical payloads.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Kernel {
    inst: MonadInstance,
    dom: FinSet,
    cod: FinSet,
    columns: Vec<TValue>,
}

/// Kernels an exhaustive enumeration may produce before giving up.
pub const KERNEL_BUDGET: u128 = 1_000_000;

impl Kernel {
    pub fn new(inst: &MonadInstance, dom: &FinSet, cod: &FinSet, columns: Vec<TValue>) -> Result<Self> {
        if columns.len() != dom.len() {
            return Err(Error::TypeMismatch(format!(
                "{} columns for domain `{dom}` of size {}",
                columns.len(),
                dom.len()
            )));
        }
        for c in &columns {
            if c.base() != cod {
                return Err(Error::TypeMismatch(format!("column over `{}`, codomain is `{cod}`", c.base())));
            }
            inst.check(c)?;
        }
        Ok(Kernel { inst: inst.clone(), dom: dom.clone(), cod: cod.clone(), columns })
    }

    /// `η ∘ f`.
    pub fn from_fun(inst: &MonadInstance, f: &FinFun) -> Self {
        let columns =
            (0..f.dom().len()).map(|i| inst.unit(f.cod(), f.apply(i)).expect("image lies in codomain")).collect();
        Kernel { inst: inst.clone(), dom: f.dom().clone(), cod: f.cod().clone(), columns }
    }

    pub fn identity(inst: &MonadInstance, x: &FinSet) -> Self {
        Self::from_fun(inst, &FinFun::identity(x))
    }

    /// `copy_X : X → X×X`.
    pub fn copy(inst: &MonadInstance, x: &FinSet) -> Self {
        Self::from_fun(inst, &FinFun::diagonal(x, 2))
    }

    /// `n`-fold copy `X → Xⁿ`.
    pub fn copy_n(inst: &MonadInstance, x: &FinSet, n: usize) -> Self {
        Self::from_fun(inst, &FinFun::diagonal(x, n))
    }

    /// `del_X : X → I`.
    pub fn discard(inst: &MonadInstance, x: &FinSet) -> Self {
        Self::from_fun(inst, &FinFun::to_unit(x))
    }

    pub fn swap(inst: &MonadInstance, x: &FinSet, y: &FinSet) -> Self {
        Self::from_fun(inst, &FinFun::swap(x, y))
    }

    /// The kernel with every column zero, when the instance has a zero.
    pub fn zero(inst: &MonadInstance, dom: &FinSet, cod: &FinSet) -> Option<Self> {
        let z = inst.zero(cod)?;
        Some(Kernel { inst: inst.clone(), dom: dom.clone(), cod: cod.clone(), columns: vec![z; dom.len()] })
    }

    pub fn sample(inst: &MonadInstance, dom: &FinSet, cod: &FinSet, rng: &mut impl Rng) -> Result<Self> {
        let columns = (0..dom.len()).map(|_| inst.sample(cod, rng)).collect::<Result<_>>()?;
        Ok(Kernel { inst: inst.clone(), dom: dom.clone(), cod: cod.clone(), columns })
    }

    /// Every kernel `dom → cod`, columns varying fastest at the last element.
    pub fn enumerate_all(inst: &MonadInstance, dom: &FinSet, cod: &FinSet) -> Result<Vec<Kernel>> {
        let per = inst.count(cod).ok_or_else(|| Error::NotEnumerable(inst.id()))?;
        let needed = per.checked_pow(dom.len() as u32).unwrap_or(u128::MAX);
        if needed > KERNEL_BUDGET {
            return Err(Error::BudgetExceeded {
                what: format!("kernels `{dom}` → `{cod}` under {}", inst.id()),
                needed,
                budget: KERNEL_BUDGET,
            });
        }
        let values: Vec<TValue> = inst.enumerate(cod)?.collect();
        let n = dom.len();
        let mut out = Vec::with_capacity(needed as usize);
        let mut idx = vec![0usize; n];
        'outer: loop {
            out.push(Kernel {
                inst: inst.clone(),
                dom: dom.clone(),
                cod: cod.clone(),
                columns: idx.iter().map(|&i| values[i].clone()).collect(),
            });
            for slot in idx.iter_mut().rev() {
                *slot += 1;
                if *slot < values.len() {
                    continue 'outer;
                }
                *slot = 0;
            }
            break;
        }
        Ok(out)
    }

    pub fn instance(&self) -> &MonadInstance {
        &self.inst
    }

    pub fn dom(&self) -> &FinSet {
        &self.dom
    }

    pub fn cod(&self) -> &FinSet {
        &self.cod
    }

    pub fn columns(&self) -> &[TValue] {
        &self.columns
    }

    pub fn column(&self, x: usize) -> &TValue {
        &self.columns[x]
    }

    fn same_instance(&self, other: &Kernel) -> Result<()> {
        if self.inst != other.inst {
            return Err(Error::TypeMismatch(format!(
                "kernels of `{}` and `{}` do not mix",
                self.inst.id(),
                other.inst.id()
            )));
        }
        Ok(())
    }

    /// Kleisli composite `g ∘ self`.
    pub fn then(&self, g: &Kernel) -> Result<Kernel> {
        compose(g, self)
    }

    /// `T(f) ∘ self`, i.e. post-composition with a base map.
    pub fn post(&self, f: &FinFun) -> Result<Kernel> {
        if f.dom() != &self.cod {
            return Err(Error::TypeMismatch(format!("cannot relabel `{}` along a map out of `{}`", self.cod, f.dom())));
        }
        let columns = self.columns.iter().map(|c| self.inst.map(f, c)).collect::<Result<_>>()?;
        Ok(Kernel { inst: self.inst.clone(), dom: self.dom.clone(), cod: f.cod().clone(), columns })
    }

    /// `self ∘ η(f)`: precomposition with a base map.
    pub fn pre(&self, f: &FinFun) -> Result<Kernel> {
        if f.cod() != &self.dom {
            return Err(Error::TypeMismatch(format!("cannot precompose `{}` with a map into `{}`", self.dom, f.cod())));
        }
        let columns = (0..f.dom().len()).map(|i| self.columns[f.apply(i)].clone()).collect();
        Ok(Kernel { inst: self.inst.clone(), dom: f.dom().clone(), cod: self.cod.clone(), columns })
    }

    /// `copy ∘ f = (f⊗f) ∘ copy`.
    pub fn is_copyable(&self) -> Result<bool> {
        let lhs = self.then(&Kernel::copy(&self.inst, &self.cod))?;
        let rhs = compose(&tensor(self, self)?, &Kernel::copy(&self.inst, &self.dom))?;
        Ok(lhs == rhs)
    }

    /// `del ∘ f = del`.
    pub fn is_discardable(&self) -> Result<bool> {
        Ok(self.then(&Kernel::discard(&self.inst, &self.cod))? == Kernel::discard(&self.inst, &self.dom))
    }

    /// `{"monad", "dom", "cod", "columns": {x: column}}`.
    pub fn to_json(&self) -> Value {
        let columns: Map<String, Value> =
            self.columns.iter().enumerate().map(|(i, c)| (self.dom.label(i), self.inst.payload_json(c))).collect();
        let mut obj = Map::new();
        obj.insert("monad".into(), Value::String(self.inst.id()));
        if let MonadKind::Writer(m) = self.inst.kind() {
            if crate::exactnum::named(m.name()).as_ref() != Some(&**m) {
                obj.insert("monoid".into(), m.to_json());
            }
        }
        obj.insert("dom".into(), self.dom.to_json());
        obj.insert("cod".into(), self.cod.to_json());
        obj.insert("columns".into(), Value::Object(columns));
        Value::Object(obj)
    }

    /// Reads the form written by [`Kernel::to_json`]. A `"monoid"` field
    /// supplies the table of a writer monad outside the bundled library.
    pub fn from_json(value: &Value) -> Result<Kernel> {
        let id = value
            .get("monad")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Parse("kernel needs a string field `monad`".into()))?;
        let inst = match value.get("monoid") {
            Some(m) => MonadInstance::writer(FiniteMonoid::from_json(m)?),
            None => MonadInstance::parse(id)?,
        };
        let dom = FinSet::from_json(value.get("dom").ok_or_else(|| Error::Parse("kernel needs `dom`".into()))?)?;
        let cod = FinSet::from_json(value.get("cod").ok_or_else(|| Error::Parse("kernel needs `cod`".into()))?)?;
        let cols = value
            .get("columns")
            .and_then(Value::as_object)
            .ok_or_else(|| Error::Parse("kernel needs an object `columns`".into()))?;
        if let Some(extra) = cols.keys().find(|k| dom.index_of(k).is_none()) {
            return Err(Error::ElementNotInSet { set: dom.name().into_owned(), element: extra.clone() });
        }
        let columns = (0..dom.len())
            .map(|i| {
                let label = dom.label(i);
                let c = cols.get(&label).ok_or_else(|| Error::Parse(format!("missing column for `{label}`")))?;
                inst.payload_from_json(&cod, c)
            })
            .collect::<Result<Vec<_>>>()?;
        Kernel::new(&inst, &dom, &cod, columns)
    }
}

/// `g ∘ f`: the column at `x` is `extend(g)(f(x))`.
pub fn compose(g: &Kernel, f: &Kernel) -> Result<Kernel> {
    f.same_instance(g)?;
    if f.cod != g.dom {
        return Err(Error::TypeMismatch(format!(
            "cannot compose `{}`→`{}` after `{}`→`{}`",
            g.dom, g.cod, f.dom, f.cod
        )));
    }
    let columns = f.columns.iter().map(|c| f.inst.extend(&g.cod, &g.columns, c)).collect::<Result<Vec<_>>>()?;
    for c in &columns {
        f.inst.check(c).map_err(|e| Error::InvariantViolation(format!("composite left the instance: {e}")))?;
    }
    Ok(Kernel { inst: f.inst.clone(), dom: f.dom.clone(), cod: g.cod.clone(), columns })
}

/// `f ⊗ g`: the column at `(x, x')` is `c(f(x), g(x'))`.
pub fn tensor(f: &Kernel, g: &Kernel) -> Result<Kernel> {
    f.same_instance(g)?;
    let mut columns = Vec::with_capacity(f.dom.len() * g.dom.len());
    for a in &f.columns {
        for b in &g.columns {
            columns.push(f.inst.lax_c(a, b)?);
        }
    }
    Ok(Kernel { inst: f.inst.clone(), dom: f.dom.times(&g.dom), cod: f.cod.times(&g.cod), columns })
}

/// `f₁ ⊗ … ⊗ fₙ`; the identity on `I` for `n = 0`.
pub fn tensor_all(inst: &MonadInstance, fs: &[Kernel]) -> Result<Kernel> {
    let mut iter = fs.iter();
    let first = match iter.next() {
        Some(f) => f.clone(),
        None => return Ok(Kernel::identity(inst, &FinSet::unit())),
    };
    iter.try_fold(first, |acc, f| tensor(&acc, f))
}

/// A named structural kernel: `id`, `copy`, `discard` or `swap`.
pub fn structural(inst: &MonadInstance, kind: &str, objects: &[FinSet]) -> Result<Kernel> {
    let need = |n: usize| {
        if objects.len() == n {
            Ok(())
        } else {
            Err(Error::TypeMismatch(format!("`{kind}` takes {n} object(s), got {}", objects.len())))
        }
    };
    match kind {
        "id" => need(1).map(|_| Kernel::identity(inst, &objects[0])),
        "copy" => need(1).map(|_| Kernel::copy(inst, &objects[0])),
        "discard" | "del" => need(1).map(|_| Kernel::discard(inst, &objects[0])),
        "swap" => need(2).map(|_| Kernel::swap(inst, &objects[0], &objects[1])),
        other => Err(Error::Parse(format!("unknown structural kernel `{other}`"))),
    }
}

/// `I×Y → Y`, dropping a leading unit coordinate.
pub fn drop_leading_unit(y: &FinSet) -> FinFun {
    let iy = FinSet::unit().times(y);
    let coords: Vec<usize> = (1..iy.arity()).collect();
    FinFun::projection(&iy, &coords).expect("coordinates in range")
}

/// `Y×I → Y`, dropping a trailing unit coordinate.
pub fn drop_trailing_unit(y: &FinSet) -> FinFun {
    let yi = y.times(&FinSet::unit());
    let coords: Vec<usize> = (0..yi.arity() - 1).collect();
    FinFun::projection(&yi, &coords).expect("coordinates in range")
}

/// Reorders the coordinates of `from` (a product of the same atoms) into the
/// order of `coords_of_target`: coordinate `j` of the result is coordinate
/// `coords_of_target[j]` of `from`.
pub fn reindex(from: &FinSet, coords_of_target: &[usize]) -> Result<FinFun> {
    let f = FinFun::projection(from, coords_of_target)?;
    debug_assert_eq!(f.cod().len(), from.len());
    Ok(f)
}
