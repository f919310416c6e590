use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::exactnum::{self, FiniteMonoid, Rat};
use crate::finset::{Element, FinFun, FinSet};

use super::value::{Payload, TValue};

/// Default multiplicity bound of the truncated free abelian group monad.
pub const DEFAULT_BOUND: i64 = 16;

/// The bundled commutative monads on finite sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum MonadKind {
    Identity,
    /// Finitely supported probability distributions `D`.
    Distribution,
    /// Finitely supported measures `M` with non-negative rational weights.
    Measure,
    /// Non-zero measures `M*`.
    NonZeroMeasure,
    /// Powerset `P`; its Kleisli category is relations.
    Powerset,
    /// Non-empty powerset `P*`.
    NonEmptyPowerset,
    /// `A × −` for a commutative monoid `A`.
    Writer(Arc<FiniteMonoid>),
    /// Free abelian group `F`, with multiplicities capped at `bound`.
    FreeAbelian {
        bound: i64,
    },
}

/// Parameters of the random samplers.
///
/// Weights are drawn as `p/q` with `p ∈ 0..=max_numerator` and
/// `q ∈ 1..=max_denominator`; instances whose carrier contains a zero
/// value return it with probability `zero_numerator/zero_denominator`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SamplerConfig {
    pub max_numerator: u32,
    pub max_denominator: u32,
    pub zero_numerator: u32,
    pub zero_denominator: u32,
    /// Multiplicities of `F` are drawn from `-max_multiplicity..=max_multiplicity`.
    pub max_multiplicity: i64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            max_numerator: 9,
            max_denominator: 4,
            zero_numerator: 1,
            zero_denominator: 10,
            max_multiplicity: 2,
        }
    }
}

/// A monad descriptor: functorial action, unit, Kleisli extension, lax
/// structure `c`, optional enumerator, sampler and scalar solver.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonadInstance {
    kind: MonadKind,
    sampler: SamplerConfig,
}

impl MonadInstance {
    pub fn new(kind: MonadKind) -> Self {
        MonadInstance { kind, sampler: SamplerConfig::default() }
    }

    pub fn identity() -> Self {
        Self::new(MonadKind::Identity)
    }

    pub fn distribution() -> Self {
        Self::new(MonadKind::Distribution)
    }

    pub fn measure() -> Self {
        Self::new(MonadKind::Measure)
    }

    pub fn nonzero_measure() -> Self {
        Self::new(MonadKind::NonZeroMeasure)
    }

    pub fn powerset() -> Self {
        Self::new(MonadKind::Powerset)
    }

    pub fn nonempty_powerset() -> Self {
        Self::new(MonadKind::NonEmptyPowerset)
    }

    pub fn writer(monoid: FiniteMonoid) -> Self {
        Self::new(MonadKind::Writer(Arc::new(monoid)))
    }

    pub fn free_abelian(bound: i64) -> Self {
        Self::new(MonadKind::FreeAbelian { bound })
    }

    pub fn with_sampler(mut self, sampler: SamplerConfig) -> Self {
        self.sampler = sampler;
        self
    }

    /// Parses `Id`, `D`, `M`, `M*`, `P`, `P*`, `writer:<monoid>` or `F[:bound]`.
    pub fn parse(id: &str) -> Result<Self> {
        let kind = match id {
            "Id" | "id" => MonadKind::Identity,
            "D" => MonadKind::Distribution,
            "M" => MonadKind::Measure,
            "M*" | "Mstar" => MonadKind::NonZeroMeasure,
            "P" => MonadKind::Powerset,
            "P*" | "Pstar" => MonadKind::NonEmptyPowerset,
            "F" => MonadKind::FreeAbelian { bound: DEFAULT_BOUND },
            _ => {
                if let Some(name) = id.strip_prefix("writer:") {
                    let m = exactnum::named(name).ok_or_else(|| Error::UnknownMonad(id.into()))?;
                    MonadKind::Writer(Arc::new(m))
                } else if let Some(b) = id.strip_prefix("F:") {
                    let bound =
                        b.parse::<i64>().ok().filter(|&b| b >= 1).ok_or_else(|| Error::UnknownMonad(id.into()))?;
                    MonadKind::FreeAbelian { bound }
                } else {
                    return Err(Error::UnknownMonad(id.into()));
                }
            }
        };
        Ok(Self::new(kind))
    }

    /// The instances listed by `classify --all`.
    pub fn all_bundled() -> Vec<MonadInstance> {
        ["Id", "D", "M", "M*", "P", "P*", "writer:Z2", "writer:Z3", "writer:AND", "F"]
            .iter()
            .map(|id| Self::parse(id).expect("bundled id"))
            .collect()
    }

    pub fn id(&self) -> String {
        match &self.kind {
            MonadKind::Identity => "Id".into(),
            MonadKind::Distribution => "D".into(),
            MonadKind::Measure => "M".into(),
            MonadKind::NonZeroMeasure => "M*".into(),
            MonadKind::Powerset => "P".into(),
            MonadKind::NonEmptyPowerset => "P*".into(),
            MonadKind::Writer(m) => format!("writer:{}", m.name()),
            MonadKind::FreeAbelian { bound } if *bound == DEFAULT_BOUND => "F".into(),
            MonadKind::FreeAbelian { bound } => format!("F:{bound}"),
        }
    }

    pub fn kind(&self) -> &MonadKind {
        &self.kind
    }

    pub fn sampler(&self) -> &SamplerConfig {
        &self.sampler
    }

    /// Payloads are weight vectors (`D`, `M`, `M*`).
    pub fn is_measure_like(&self) -> bool {
        matches!(self.kind, MonadKind::Distribution | MonadKind::Measure | MonadKind::NonZeroMeasure)
    }

    pub fn is_enumerable(&self) -> bool {
        !self.is_measure_like()
    }

    /// Non-enumerable instances decide scalar inverses by a closed formula.
    pub fn has_scalar_solver(&self) -> bool {
        self.is_measure_like() || matches!(self.kind, MonadKind::Identity)
    }

    fn invalid(&self, reason: impl Into<String>) -> Error {
        Error::PayloadInvalid { monad: self.id(), reason: reason.into() }
    }

    fn bound_check(&self, v: i128) -> Result<i64> {
        let bound = match self.kind {
            MonadKind::FreeAbelian { bound } => bound,
            _ => unreachable!("bound check on non-F instance"),
        };
        if v.unsigned_abs() > bound as u128 {
            Err(Error::OutOfBound { value: v.to_string(), bound })
        } else {
            Ok(v as i64)
        }
    }

    fn monoid(&self) -> &FiniteMonoid {
        match &self.kind {
            MonadKind::Writer(m) => m,
            _ => unreachable!("monoid of non-writer instance"),
        }
    }

    /// Checks that `t` is a well-formed element of `T(t.base)`.
    pub fn check(&self, t: &TValue) -> Result<()> {
        let n = t.base.len();
        match (&self.kind, &t.payload) {
            (MonadKind::Identity, Payload::Point(i)) if *i < n => Ok(()),
            (MonadKind::Distribution | MonadKind::Measure | MonadKind::NonZeroMeasure, Payload::Weights(w)) => {
                if w.len() != n {
                    return Err(self.invalid(format!("{} weights over {n} elements", w.len())));
                }
                if w.iter().any(Rat::is_negative) {
                    return Err(self.invalid("negative weight"));
                }
                match self.kind {
                    MonadKind::Distribution if !w.iter().sum::<Rat>().is_one() => {
                        Err(self.invalid("weights do not sum to 1"))
                    }
                    MonadKind::NonZeroMeasure if w.iter().all(Rat::is_zero) => Err(self.invalid("zero measure")),
                    _ => Ok(()),
                }
            }
            (MonadKind::Powerset | MonadKind::NonEmptyPowerset, Payload::Subset(s)) => {
                if s.len() != n {
                    return Err(self.invalid(format!("{} flags over {n} elements", s.len())));
                }
                if matches!(self.kind, MonadKind::NonEmptyPowerset) && !s.iter().any(|&b| b) {
                    return Err(self.invalid("empty subset"));
                }
                Ok(())
            }
            (MonadKind::Writer(m), Payload::Tagged { tag, point }) => {
                if *tag >= m.len() || *point >= n {
                    Err(self.invalid("tag or point out of range"))
                } else {
                    Ok(())
                }
            }
            (MonadKind::FreeAbelian { bound }, Payload::Multiset(v)) => {
                if v.len() != n {
                    return Err(self.invalid(format!("{} multiplicities over {n} elements", v.len())));
                }
                if let Some(x) = v.iter().find(|x| x.abs() > *bound) {
                    return Err(Error::OutOfBound { value: x.to_string(), bound: *bound });
                }
                Ok(())
            }
            _ => Err(self.invalid("payload kind does not match monad")),
        }
    }

    /// Builds and validates a value.
    pub fn value(&self, base: &FinSet, payload: Payload) -> Result<TValue> {
        let t = TValue { base: base.clone(), payload };
        self.check(&t)?;
        Ok(t)
    }

    /// A measure-like value from weights.
    pub fn weights(&self, base: &FinSet, w: Vec<Rat>) -> Result<TValue> {
        self.value(base, Payload::Weights(w))
    }

    /// `η_X(x)`.
    pub fn unit(&self, x: &FinSet, i: usize) -> Result<TValue> {
        if i >= x.len() {
            return Err(Error::ElementNotInSet { set: x.name().into_owned(), element: format!("#{i}") });
        }
        let n = x.len();
        let payload = match &self.kind {
            MonadKind::Identity => Payload::Point(i),
            MonadKind::Distribution | MonadKind::Measure | MonadKind::NonZeroMeasure => {
                let mut w = vec![Rat::zero(); n];
                w[i] = Rat::one();
                Payload::Weights(w)
            }
            MonadKind::Powerset | MonadKind::NonEmptyPowerset => {
                let mut s = vec![false; n];
                s[i] = true;
                Payload::Subset(s)
            }
            MonadKind::Writer(m) => Payload::Tagged { tag: m.unit(), point: i },
            MonadKind::FreeAbelian { .. } => {
                let mut v = vec![0; n];
                v[i] = 1;
                Payload::Multiset(v)
            }
        };
        Ok(TValue { base: x.clone(), payload })
    }

    pub fn unit_at(&self, e: &Element) -> TValue {
        self.unit(&e.set, e.index).expect("element lies in its set")
    }

    fn expect_base(&self, t: &TValue, base: &FinSet, what: &str) -> Result<()> {
        if &t.base != base {
            return Err(Error::TypeMismatch(format!("{what}: value over `{}` where `{base}` was expected", t.base)));
        }
        Ok(())
    }

    /// `T(f)(t)`.
    pub fn map(&self, f: &FinFun, t: &TValue) -> Result<TValue> {
        self.expect_base(t, f.dom(), "map")?;
        let m = f.cod().len();
        let payload = match &t.payload {
            Payload::Point(i) => Payload::Point(f.apply(*i)),
            Payload::Weights(w) => {
                let mut out = vec![Rat::zero(); m];
                for (i, x) in w.iter().enumerate() {
                    if !x.is_zero() {
                        out[f.apply(i)] = &out[f.apply(i)] + x;
                    }
                }
                Payload::Weights(out)
            }
            Payload::Subset(s) => {
                let mut out = vec![false; m];
                for (i, &b) in s.iter().enumerate() {
                    out[f.apply(i)] |= b;
                }
                Payload::Subset(out)
            }
            Payload::Tagged { tag, point } => Payload::Tagged { tag: *tag, point: f.apply(*point) },
            Payload::Multiset(v) => {
                let mut out = vec![0i128; m];
                for (i, &x) in v.iter().enumerate() {
                    out[f.apply(i)] += x as i128;
                }
                Payload::Multiset(out.into_iter().map(|x| self.bound_check(x)).collect::<Result<_>>()?)
            }
        };
        self.value(f.cod(), payload)
    }

    /// Kleisli extension: `columns` is a map `dom(t) → T(cod)` given as one
    /// value per element of `t.base`.
    pub fn extend(&self, cod: &FinSet, columns: &[TValue], t: &TValue) -> Result<TValue> {
        if columns.len() != t.base.len() {
            return Err(Error::TypeMismatch(format!(
                "Kleisli map has {} columns, value lives over {} elements",
                columns.len(),
                t.base.len()
            )));
        }
        for col in columns {
            self.expect_base(col, cod, "extend")?;
        }
        let m = cod.len();
        let payload = match &t.payload {
            Payload::Point(i) => columns[*i].payload.clone(),
            Payload::Weights(w) => {
                let mut out = vec![Rat::zero(); m];
                for (x, col) in w.iter().zip(columns) {
                    if x.is_zero() {
                        continue;
                    }
                    let cw = col.weights().ok_or_else(|| self.invalid("column is not a measure"))?;
                    for (o, y) in out.iter_mut().zip(cw) {
                        if !y.is_zero() {
                            *o = &*o + &(x * y);
                        }
                    }
                }
                Payload::Weights(out)
            }
            Payload::Subset(s) => {
                let mut out = vec![false; m];
                for (&b, col) in s.iter().zip(columns) {
                    if !b {
                        continue;
                    }
                    match &col.payload {
                        Payload::Subset(cs) => out.iter_mut().zip(cs).for_each(|(o, &c)| *o |= c),
                        _ => return Err(self.invalid("column is not a subset")),
                    }
                }
                Payload::Subset(out)
            }
            Payload::Tagged { tag, point } => match columns[*point].payload {
                Payload::Tagged { tag: b, point: q } => Payload::Tagged { tag: self.monoid().mul(*tag, b), point: q },
                _ => return Err(self.invalid("column is not a writer value")),
            },
            Payload::Multiset(v) => {
                let mut out = vec![0i128; m];
                for (&x, col) in v.iter().zip(columns) {
                    if x == 0 {
                        continue;
                    }
                    match &col.payload {
                        Payload::Multiset(cv) => {
                            for (o, &y) in out.iter_mut().zip(cv) {
                                *o += x as i128 * y as i128;
                            }
                        }
                        _ => return Err(self.invalid("column is not a multiset")),
                    }
                }
                Payload::Multiset(out.into_iter().map(|x| self.bound_check(x)).collect::<Result<_>>()?)
            }
        };
        self.value(cod, payload)
    }

    /// The lax structure `c_{X,Y} : TX × TY → T(X×Y)`.
    pub fn lax_c(&self, t: &TValue, u: &TValue) -> Result<TValue> {
        let base = t.base.times(&u.base);
        let ny = u.base.len();
        let payload = match (&t.payload, &u.payload) {
            (Payload::Point(i), Payload::Point(j)) => Payload::Point(i * ny + j),
            (Payload::Weights(a), Payload::Weights(b)) => {
                Payload::Weights(a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect())
            }
            (Payload::Subset(a), Payload::Subset(b)) => {
                Payload::Subset(a.iter().flat_map(|&x| b.iter().map(move |&y| x && y)).collect())
            }
            (Payload::Tagged { tag: a, point: i }, Payload::Tagged { tag: b, point: j }) => {
                Payload::Tagged { tag: self.monoid().mul(*a, *b), point: i * ny + j }
            }
            (Payload::Multiset(a), Payload::Multiset(b)) => Payload::Multiset(
                a.iter()
                    .flat_map(|&x| b.iter().map(move |&y| x as i128 * y as i128))
                    .map(|v| self.bound_check(v))
                    .collect::<Result<_>>()?,
            ),
            _ => return Err(self.invalid("lax_c of mismatched payloads")),
        };
        self.value(&base, payload)
    }

    /// Iterated lax structure `TX₁ × … × TXₙ → T(X₁×…×Xₙ)`; `η(*)` for `n = 0`.
    pub fn lax_c_n(&self, ts: &[TValue]) -> Result<TValue> {
        let mut iter = ts.iter();
        let first = match iter.next() {
            Some(t) => t.clone(),
            None => return self.unit(&FinSet::unit(), 0),
        };
        iter.try_fold(first, |acc, t| self.lax_c(&acc, t))
    }

    /// The strength `X × TY → T(X×Y)`, realized as `c ∘ (η × id)`.
    pub fn strength(&self, x: &Element, u: &TValue) -> Result<TValue> {
        self.lax_c(&self.unit(&x.set, x.index)?, u)
    }

    /// Left inverse of `strength(x, −)`: the candidate `q` with
    /// `strength(x, q) = t`. The caller must verify the candidate.
    pub fn slice(&self, t: &TValue, x: &FinSet, i: usize, y: &FinSet) -> Result<Option<TValue>> {
        self.expect_base(t, &x.times(y), "slice")?;
        let ny = y.len();
        let range = i * ny..(i + 1) * ny;
        let payload = match &t.payload {
            Payload::Point(p) if range.contains(p) => Payload::Point(p - i * ny),
            Payload::Tagged { tag, point } if range.contains(point) => {
                Payload::Tagged { tag: *tag, point: point - i * ny }
            }
            Payload::Point(_) | Payload::Tagged { .. } => return Ok(None),
            Payload::Weights(w) => Payload::Weights(w[range].to_vec()),
            Payload::Subset(s) => Payload::Subset(s[range].to_vec()),
            Payload::Multiset(v) => Payload::Multiset(v[range].to_vec()),
        };
        let q = TValue { base: y.clone(), payload };
        Ok(self.check(&q).ok().map(|_| q))
    }

    /// The zero measure, empty subset or empty multiset, when the carrier has one.
    pub fn zero(&self, x: &FinSet) -> Option<TValue> {
        let n = x.len();
        let payload = match self.kind {
            MonadKind::Measure => Payload::Weights(vec![Rat::zero(); n]),
            MonadKind::Powerset => Payload::Subset(vec![false; n]),
            MonadKind::FreeAbelian { .. } => Payload::Multiset(vec![0; n]),
            _ => return None,
        };
        Some(TValue { base: x.clone(), payload })
    }

    /// Number of elements of `TX`, for enumerable instances.
    pub fn count(&self, x: &FinSet) -> Option<u128> {
        let n = x.len() as u32;
        match &self.kind {
            MonadKind::Identity => Some(n as u128),
            MonadKind::Powerset => 2u128.checked_pow(n),
            MonadKind::NonEmptyPowerset => 2u128.checked_pow(n).map(|k| k - 1),
            MonadKind::Writer(m) => Some(m.len() as u128 * n as u128),
            MonadKind::FreeAbelian { bound } => (2 * *bound as u128 + 1).checked_pow(n),
            _ => None,
        }
    }

    /// Every element of `TX` exactly once.
    ///
    /// Multiplicities of `F` run through `0, 1, -1, 2, -2, …` in each
    /// coordinate, so small values come first.
    pub fn enumerate(&self, x: &FinSet) -> Result<Box<dyn Iterator<Item = TValue> + 'static>> {
        let base = x.clone();
        let n = x.len();
        let mk = move |payload| TValue { base: base.clone(), payload };
        Ok(match &self.kind {
            MonadKind::Identity => Box::new((0..n).map(move |i| mk(Payload::Point(i)))),
            MonadKind::Powerset | MonadKind::NonEmptyPowerset => {
                if n >= 64 {
                    return Err(Error::BudgetExceeded {
                        what: format!("subsets of `{x}`"),
                        needed: u128::MAX,
                        budget: u64::MAX as u128,
                    });
                }
                let start = if matches!(self.kind, MonadKind::NonEmptyPowerset) { 1 } else { 0 };
                Box::new(
                    (start..1u64 << n)
                        .map(move |mask| mk(Payload::Subset((0..n).map(|i| mask >> i & 1 == 1).collect()))),
                )
            }
            MonadKind::Writer(m) => {
                let k = m.len();
                Box::new(
                    (0..k)
                        .flat_map(move |a| (0..n).map(move |p| (a, p)))
                        .map(move |(tag, point)| mk(Payload::Tagged { tag, point })),
                )
            }
            MonadKind::FreeAbelian { bound } => {
                let values: Vec<i64> = std::iter::once(0).chain((1..=*bound).flat_map(|v| [v, -v])).collect();
                let k = values.len();
                let mut next = Some(vec![0usize; n]);
                Box::new(std::iter::from_fn(move || {
                    let current = next.take()?;
                    let mut succ = current.clone();
                    let mut carried = true;
                    for slot in succ.iter_mut().rev() {
                        *slot += 1;
                        if *slot < k {
                            carried = false;
                            break;
                        }
                        *slot = 0;
                    }
                    if !carried {
                        next = Some(succ);
                    }
                    Some(mk(Payload::Multiset(current.iter().map(|&j| values[j]).collect())))
                }))
            }
            _ => return Err(Error::NotEnumerable(self.id())),
        })
    }

    fn sample_weight(&self, rng: &mut impl Rng) -> Rat {
        let s = &self.sampler;
        let p = rng.random_range(0..=s.max_numerator) as i64;
        let q = rng.random_range(1..=s.max_denominator.max(1)) as i64;
        Rat::new(p, q)
    }

    fn inject_zero(&self, rng: &mut impl Rng) -> bool {
        let s = &self.sampler;
        s.zero_numerator > 0 && rng.random_ratio(s.zero_numerator.min(s.zero_denominator), s.zero_denominator)
    }

    /// A random element of `TX`, resampled until it satisfies the instance
    /// invariants.
    pub fn sample(&self, x: &FinSet, rng: &mut impl Rng) -> Result<TValue> {
        let n = x.len();
        let empty = || Error::PayloadInvalid { monad: self.id(), reason: format!("`{x}` carries no values to sample") };
        let payload = match &self.kind {
            MonadKind::Identity => {
                if n == 0 {
                    return Err(empty());
                }
                Payload::Point(rng.random_range(0..n))
            }
            MonadKind::Measure => {
                if self.inject_zero(rng) {
                    Payload::Weights(vec![Rat::zero(); n])
                } else {
                    Payload::Weights((0..n).map(|_| self.sample_weight(rng)).collect())
                }
            }
            MonadKind::NonZeroMeasure | MonadKind::Distribution => {
                if n == 0 {
                    return Err(empty());
                }
                let w = loop {
                    let w: Vec<Rat> = (0..n).map(|_| self.sample_weight(rng)).collect();
                    if w.iter().any(|r| !r.is_zero()) {
                        break w;
                    }
                };
                if matches!(self.kind, MonadKind::Distribution) {
                    let total: Rat = w.iter().sum();
                    Payload::Weights(w.iter().map(|r| r / &total).collect())
                } else {
                    Payload::Weights(w)
                }
            }
            MonadKind::Powerset => Payload::Subset((0..n).map(|_| rng.random_bool(0.5)).collect()),
            MonadKind::NonEmptyPowerset => {
                if n == 0 {
                    return Err(empty());
                }
                loop {
                    let s: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
                    if s.iter().any(|&b| b) {
                        break Payload::Subset(s);
                    }
                }
            }
            MonadKind::Writer(m) => {
                if n == 0 {
                    return Err(empty());
                }
                Payload::Tagged { tag: rng.random_range(0..m.len()), point: rng.random_range(0..n) }
            }
            MonadKind::FreeAbelian { bound } => {
                if self.inject_zero(rng) {
                    Payload::Multiset(vec![0; n])
                } else {
                    let r = self.sampler.max_multiplicity.min(*bound);
                    Payload::Multiset((0..n).map(|_| rng.random_range(-r..=r)).collect())
                }
            }
        };
        self.value(x, payload)
    }

    /// Unit of the monoid `T1`: `η₁(*)`.
    pub fn scalar_one(&self) -> TValue {
        self.unit(&FinSet::unit(), 0).expect("I is inhabited")
    }

    /// Multiplication of `T1`: `c_{1,1}` followed by `T(1×1) ≅ T1`.
    pub fn scalar_mul(&self, a: &TValue, b: &TValue) -> Result<TValue> {
        let one = FinSet::unit();
        self.expect_base(a, &one, "scalar")?;
        self.expect_base(b, &one, "scalar")?;
        let c = self.lax_c(a, b)?;
        self.map(&unit_square_collapse(), &c)
    }

    /// Inverse in `T1`, if any: reciprocal for weight payloads, exhaustive
    /// search over `T1` otherwise. Results are always verified.
    pub fn scalar_inverse(&self, a: &TValue) -> Result<Option<TValue>> {
        let one = self.scalar_one();
        let candidate = match &a.payload {
            Payload::Weights(w) => match w[0].recip() {
                None => None,
                Some(r) => self.weights(&FinSet::unit(), vec![r]).ok(),
            },
            Payload::Point(_) => Some(a.clone()),
            _ => {
                let mut found = None;
                for b in self.enumerate(&FinSet::unit())? {
                    match self.scalar_mul(a, &b) {
                        Ok(p) if p == one => {
                            found = Some(b);
                            break;
                        }
                        Ok(_) | Err(Error::OutOfBound { .. }) => {}
                        Err(e) => return Err(e),
                    }
                }
                found
            }
        };
        match candidate {
            Some(b) if self.scalar_mul(a, &b)? == one && self.scalar_mul(&b, a)? == one => Ok(Some(b)),
            _ => Ok(None),
        }
    }
}

/// `I×I → I`.
pub fn unit_square_collapse() -> FinFun {
    let one = FinSet::unit();
    FinFun::projection(&one.times(&one), &[0]).expect("I×I has two coordinates")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(name: &str, labels: &[&str]) -> FinSet {
        FinSet::new(name, labels.iter().map(|s| s.to_string()).collect()).unwrap()
    }

    fn r(p: i64, q: i64) -> Rat {
        Rat::new(p, q)
    }

    #[test]
    fn unit_examples() {
        let x = set("X", &["x", "y"]);
        let m = MonadInstance::measure().unit(&x, 0).unwrap();
        assert_eq!(m.weights().unwrap(), &[Rat::one(), Rat::zero()]);
        let p = MonadInstance::powerset().unit(&x, 0).unwrap();
        assert_eq!(p.payload(), &Payload::Subset(vec![true, false]));
        let w = MonadInstance::parse("writer:Z2").unwrap();
        assert_eq!(w.unit(&x, 0).unwrap().payload(), &Payload::Tagged { tag: 0, point: 0 });
        assert!(matches!(MonadInstance::measure().unit(&x, 2), Err(Error::ElementNotInSet { .. })));
    }

    #[test]
    fn lax_c_examples() {
        let x = set("X", &["x"]);
        let y = set("Y", &["y"]);
        let m = MonadInstance::measure();
        let t = m.weights(&x, vec![r(2, 1)]).unwrap();
        let u = m.weights(&y, vec![r(3, 1)]).unwrap();
        assert_eq!(m.lax_c(&t, &u).unwrap().weights().unwrap(), &[r(6, 1)]);

        let ms = MonadInstance::nonzero_measure();
        let t = ms.weights(&x, vec![r(1, 2)]).unwrap();
        let u = ms.weights(&y, vec![r(4, 1)]).unwrap();
        let c = ms.lax_c(&t, &u).unwrap();
        assert_eq!(c.weights().unwrap(), &[r(2, 1)]);
        assert!(ms.check(&c).is_ok());

        let p = MonadInstance::powerset();
        let x2 = set("X", &["x1", "x2"]);
        let y1 = set("Y", &["y1"]);
        let t = p.value(&x2, Payload::Subset(vec![true, true])).unwrap();
        let u = p.value(&y1, Payload::Subset(vec![true])).unwrap();
        let c = p.lax_c(&t, &u).unwrap();
        assert_eq!(c.payload(), &Payload::Subset(vec![true, true]));
        assert_eq!(c.base().elements(), ["(x1,y1)", "(x2,y1)"]);
    }

    #[test]
    fn strength_examples() {
        let x = set("X", &["x"]);
        let y = set("Y", &["y1", "y2"]);
        let m = MonadInstance::measure();
        let zero = m.zero(&y).unwrap();
        assert!(m.strength(&x.element(0).unwrap(), &zero).unwrap().is_zero());

        let d = MonadInstance::distribution();
        let u = d.weights(&y, vec![r(1, 2), r(1, 2)]).unwrap();
        let s = d.strength(&x.element(0).unwrap(), &u).unwrap();
        assert_eq!(s.weights().unwrap(), &[r(1, 2), r(1, 2)]);

        let w = MonadInstance::parse("writer:Z2").unwrap();
        let u = w.value(&y, Payload::Tagged { tag: 1, point: 0 }).unwrap();
        let s = w.strength(&x.element(0).unwrap(), &u).unwrap();
        assert_eq!(s.payload(), &Payload::Tagged { tag: 1, point: 0 });
    }

    #[test]
    fn enumeration_counts() {
        let x = FinSet::numbered("X", "x", 2);
        let w = MonadInstance::parse("writer:Z2").unwrap();
        assert_eq!(w.enumerate(&x).unwrap().count(), 4);
        assert_eq!(MonadInstance::powerset().enumerate(&x).unwrap().count(), 4);
        assert_eq!(MonadInstance::nonempty_powerset().enumerate(&x).unwrap().count(), 3);
        assert_eq!(MonadInstance::free_abelian(2).enumerate(&x).unwrap().count(), 25);
        assert!(matches!(MonadInstance::measure().enumerate(&x), Err(Error::NotEnumerable(_))));
        for inst in [w, MonadInstance::powerset(), MonadInstance::free_abelian(2)] {
            let all: Vec<_> = inst.enumerate(&x).unwrap().collect();
            assert_eq!(all.len() as u128, inst.count(&x).unwrap());
            let distinct: std::collections::HashSet<_> = all.iter().collect();
            assert_eq!(distinct.len(), all.len());
            assert!(all.iter().all(|t| inst.check(t).is_ok()));
        }
    }

    #[test]
    fn invariants_enforced() {
        let x = FinSet::numbered("X", "x", 2);
        let ms = MonadInstance::nonzero_measure();
        assert!(ms.weights(&x, vec![Rat::zero(), Rat::zero()]).is_err());
        let d = MonadInstance::distribution();
        assert!(d.weights(&x, vec![r(1, 2), r(1, 3)]).is_err());
        assert!(MonadInstance::measure().weights(&x, vec![r(-1, 2), Rat::zero()]).is_err());
        let f = MonadInstance::free_abelian(16);
        assert!(matches!(f.value(&x, Payload::Multiset(vec![17, 0])), Err(Error::OutOfBound { .. })));
        let big = f.value(&x, Payload::Multiset(vec![5, 0])).unwrap();
        assert!(matches!(f.lax_c(&big, &big), Err(Error::OutOfBound { .. })));
    }

    #[test]
    fn scalar_inverses() {
        let ms = MonadInstance::nonzero_measure();
        let half = ms.weights(&FinSet::unit(), vec![r(1, 2)]).unwrap();
        let inv = ms.scalar_inverse(&half).unwrap().unwrap();
        assert_eq!(inv.weights().unwrap(), &[r(2, 1)]);
        let m = MonadInstance::measure();
        assert_eq!(m.scalar_inverse(&m.zero(&FinSet::unit()).unwrap()).unwrap(), None);
        let f = MonadInstance::free_abelian(16);
        let two = f.value(&FinSet::unit(), Payload::Multiset(vec![2])).unwrap();
        assert_eq!(f.scalar_inverse(&two).unwrap(), None);
        let minus = f.value(&FinSet::unit(), Payload::Multiset(vec![-1])).unwrap();
        assert_eq!(f.scalar_inverse(&minus).unwrap(), Some(minus));
    }

    #[test]
    fn sampler_respects_invariants() {
        let x = FinSet::numbered("X", "x", 3);
        for inst in MonadInstance::all_bundled() {
            for t in 0..50 {
                let mut rng = crate::trial_rng(3, t);
                let v = inst.sample(&x, &mut rng).unwrap();
                assert!(inst.check(&v).is_ok(), "{} sampled {v:?}", inst.id());
            }
        }
    }

    #[test]
    fn parse_ids() {
        for inst in MonadInstance::all_bundled() {
            assert_eq!(MonadInstance::parse(&inst.id()).unwrap(), inst);
        }
        assert_eq!(MonadInstance::parse("F:8").unwrap().id(), "F:8");
        assert!(matches!(MonadInstance::parse("bogus"), Err(Error::UnknownMonad(_))));
        assert!(MonadInstance::parse("writer:nope").is_err());
    }
}
