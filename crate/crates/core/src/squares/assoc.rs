use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactnum::Rat;
use crate::finset::FinSet;
use crate::monads::{MonadInstance, MonadKind, Payload, TValue};

use super::{Mediation, Square};

/// ```text
/// TX×TY×TZ ──id×c──▶ TX×T(Y×Z)
///     │                  │
///   c×id                 c
///     ▼                  ▼
/// T(X×Y)×TZ ────c───▶ T(X×Y×Z)
/// ```
#[derive(Clone, Debug)]
pub struct AssocSquare {
    inst: MonadInstance,
    x: FinSet,
    y: FinSet,
    z: FinSet,
}

type Pair = (TValue, TValue);

impl AssocSquare {
    pub fn new(inst: &MonadInstance, x: &FinSet, y: &FinSet, z: &FinSet) -> Self {
        AssocSquare { inst: inst.clone(), x: x.clone(), y: y.clone(), z: z.clone() }
    }

    /// Atoms `X, Y, Z` of the given sizes.
    pub fn with_sizes(inst: &MonadInstance, sizes: [usize; 3]) -> Self {
        Self::new(
            inst,
            &FinSet::numbered("X", "x", sizes[0]),
            &FinSet::numbered("Y", "y", sizes[1]),
            &FinSet::numbered("Z", "z", sizes[2]),
        )
    }

    fn nonzero_sample(&self, base: &FinSet, rng: &mut ChaCha8Rng) -> Result<TValue> {
        loop {
            let t = self.inst.sample(base, rng)?;
            if !t.is_zero() {
                return Ok(t);
            }
        }
    }

    fn pairs(&self, a: &FinSet, b: &FinSet) -> Result<Option<Vec<Pair>>> {
        if !self.inst.is_enumerable() {
            return Ok(None);
        }
        let bs: Vec<TValue> = self.inst.enumerate(b)?.collect();
        Ok(Some(self.inst.enumerate(a)?.flat_map(|u| bs.iter().map(move |v| (u.clone(), v.clone()))).collect()))
    }

    /// The `q` pinned by a non-zero coordinate of `z` (from `w`) or of `u`
    /// (from `v`). Both zero leaves `q` free.
    fn solve_weights(&self, u: &TValue, w: &TValue, v: &TValue, z: &TValue) -> Result<Mediation<TValue>> {
        let ny = self.y.len();
        let nz = self.z.len();
        let (zw, uw, ww, vw) = (z.weights(), u.weights(), w.weights(), v.weights());
        let (zw, uw, ww, vw) = match (zw, uw, ww, vw) {
            (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
            _ => return Err(Error::TypeMismatch("weight solver on non-weight values".into())),
        };
        let q: Vec<Rat> = if let Some(z0) = zw.iter().position(|r| !r.is_zero()) {
            (0..ny).map(|y| &ww[y * nz + z0] / &zw[z0]).collect()
        } else if let Some(x0) = uw.iter().position(|r| !r.is_zero()) {
            (0..ny).map(|y| &vw[x0 * ny + y] / &uw[x0]).collect()
        } else {
            return Ok(self.degenerate(w, v));
        };
        self.verify_candidate(Payload::Weights(q), u, w, v, z)
    }

    fn solve_multiset(&self, u: &TValue, w: &TValue, v: &TValue, z: &TValue) -> Result<Mediation<TValue>> {
        let ny = self.y.len();
        let nz = self.z.len();
        let (Payload::Multiset(uv), Payload::Multiset(wv), Payload::Multiset(vv), Payload::Multiset(zv)) =
            (u.payload(), w.payload(), v.payload(), z.payload())
        else {
            return Err(Error::TypeMismatch("multiset solver on non-multiset values".into()));
        };
        let divide = |num: i64, den: i64| (num % den == 0).then(|| num / den);
        let q: Option<Vec<i64>> = if let Some(z0) = zv.iter().position(|&n| n != 0) {
            (0..ny).map(|y| divide(wv[y * nz + z0], zv[z0])).collect()
        } else if let Some(x0) = uv.iter().position(|&n| n != 0) {
            (0..ny).map(|y| divide(vv[x0 * ny + y], uv[x0])).collect()
        } else {
            return Ok(self.degenerate(w, v));
        };
        match q {
            Some(q) => self.verify_candidate(Payload::Multiset(q), u, w, v, z),
            None => Ok(Mediation::Missing { reason: "forced q is not integral".into() }),
        }
    }

    /// `u = 0` and `z = 0`: every `q` maps to the zero cone.
    fn degenerate(&self, w: &TValue, v: &TValue) -> Mediation<TValue> {
        if w.is_zero() && v.is_zero() {
            let zero = self.inst.zero(&self.y).expect("zero values exist here");
            let one = self.inst.unit(&self.y, 0).expect("Y is inhabited");
            Mediation::Multiple(zero, one)
        } else {
            Mediation::Missing { reason: "u and z are zero but the cone is not".into() }
        }
    }

    fn verify_candidate(
        &self,
        q: Payload,
        u: &TValue,
        w: &TValue,
        v: &TValue,
        z: &TValue,
    ) -> Result<Mediation<TValue>> {
        let q = match self.inst.value(&self.y, q) {
            Ok(q) => q,
            Err(Error::PayloadInvalid { reason, .. }) => {
                return Ok(Mediation::Missing { reason: format!("forced q is not in TY: {reason}") })
            }
            Err(e) => return Err(e),
        };
        if &self.inst.lax_c(&q, z)? == w && &self.inst.lax_c(u, &q)? == v {
            Ok(Mediation::Unique(q))
        } else {
            Ok(Mediation::Missing { reason: "forced q does not satisfy both equations".into() })
        }
    }

    fn search(&self, u: &TValue, w: &TValue, v: &TValue, z: &TValue) -> Result<Mediation<TValue>> {
        let mut found = Vec::new();
        for q in self.inst.enumerate(&self.y)? {
            if &self.inst.lax_c(&q, z)? == w && &self.inst.lax_c(u, &q)? == v {
                found.push(q);
                if found.len() == 2 {
                    break;
                }
            }
        }
        let mut it = found.into_iter();
        Ok(match (it.next(), it.next()) {
            (Some(a), None) => Mediation::Unique(a),
            (Some(a), Some(b)) => Mediation::Multiple(a, b),
            _ => Mediation::Missing { reason: "no q in TY satisfies both equations".into() },
        })
    }
}

impl Square for AssocSquare {
    type Apex = (TValue, TValue, TValue);
    type Right = Pair;
    type Down = Pair;
    type Target = TValue;

    fn name(&self) -> String {
        format!("assoc:{}:{},{},{}", self.inst.id(), self.x.len(), self.y.len(), self.z.len())
    }

    fn property(&self) -> String {
        "associativity square of c is a pullback".into()
    }

    fn top(&self, (u, q, z): &Self::Apex) -> Result<Pair> {
        Ok((u.clone(), self.inst.lax_c(q, z)?))
    }

    fn left(&self, (u, q, z): &Self::Apex) -> Result<Pair> {
        Ok((self.inst.lax_c(u, q)?, z.clone()))
    }

    fn right(&self, (u, w): &Pair) -> Result<TValue> {
        self.inst.lax_c(u, w)
    }

    fn bottom(&self, (v, z): &Pair) -> Result<TValue> {
        self.inst.lax_c(v, z)
    }

    fn apexes(&self) -> Result<Option<Vec<Self::Apex>>> {
        if !self.inst.is_enumerable() {
            return Ok(None);
        }
        let ys: Vec<TValue> = self.inst.enumerate(&self.y)?.collect();
        let zs: Vec<TValue> = self.inst.enumerate(&self.z)?.collect();
        let mut out = Vec::new();
        for u in self.inst.enumerate(&self.x)? {
            for q in &ys {
                for z in &zs {
                    out.push((u.clone(), q.clone(), z.clone()));
                }
            }
        }
        Ok(Some(out))
    }

    fn rights(&self) -> Result<Option<Vec<Pair>>> {
        self.pairs(&self.x, &self.y.times(&self.z))
    }

    fn downs(&self) -> Result<Option<Vec<Pair>>> {
        self.pairs(&self.x.times(&self.y), &self.z)
    }

    fn sample_apex(&self, rng: &mut ChaCha8Rng) -> Result<Self::Apex> {
        Ok((self.inst.sample(&self.x, rng)?, self.inst.sample(&self.y, rng)?, self.inst.sample(&self.z, rng)?))
    }

    /// `((0, η), (η, 0))`: both sides map to zero, and no `q` can produce
    /// the non-zero components.
    fn probe_cones(&self) -> Vec<(Pair, Pair)> {
        let (Some(zx), Some(zz)) = (self.inst.zero(&self.x), self.inst.zero(&self.z)) else {
            return Vec::new();
        };
        let p = self.inst.unit(&self.y.times(&self.z), 0).expect("inhabited");
        let q = self.inst.unit(&self.x.times(&self.y), 0).expect("inhabited");
        vec![((zx, p), (q, zz))]
    }

    /// Images of sampled apexes, rescaled by `λ` in the measure case and
    /// with the degenerate zero cone injected at the configured rate.
    fn sample_cone(&self, rng: &mut ChaCha8Rng) -> Result<(Pair, Pair)> {
        let s = self.inst.sampler();
        if let (Some(zx), Some(zz)) = (self.inst.zero(&self.x), self.inst.zero(&self.z)) {
            if s.zero_numerator > 0 && rng.random_ratio(s.zero_numerator.min(s.zero_denominator), s.zero_denominator) {
                let p = self.nonzero_sample(&self.y.times(&self.z), rng)?;
                let q = self.nonzero_sample(&self.x.times(&self.y), rng)?;
                return Ok(((zx, p), (q, zz)));
            }
        }
        let a = self.sample_apex(rng)?;
        let (u, w) = self.top(&a)?;
        let d = self.left(&a)?;
        if matches!(self.inst.kind(), MonadKind::Measure | MonadKind::NonZeroMeasure) {
            let lambda = Rat::new(
                rng.random_range(1..=s.max_numerator.max(1)) as i64,
                rng.random_range(1..=s.max_denominator.max(1)) as i64,
            );
            let scale = |t: &TValue, k: &Rat| -> Result<TValue> {
                let w = t.weights().expect("measure values").iter().map(|r| r * k).collect();
                self.inst.weights(t.base(), w)
            };
            let inv = Rat::one().checked_div(&lambda).expect("λ > 0");
            return Ok(((scale(&u, &lambda)?, scale(&w, &inv)?), d));
        }
        Ok(((u, w), d))
    }

    fn mediate(&self, (u, w): &Pair, (v, z): &Pair) -> Option<Result<Mediation<Self::Apex>>> {
        let q = if self.inst.is_measure_like() {
            self.solve_weights(u, w, v, z)
        } else if matches!(self.inst.kind(), MonadKind::FreeAbelian { .. }) {
            self.solve_multiset(u, w, v, z)
        } else {
            self.search(u, w, v, z)
        };
        let lift = |q: TValue| (u.clone(), q, z.clone());
        Some(q.map(|m| match m {
            Mediation::Unique(q) => Mediation::Unique(lift(q)),
            Mediation::Multiple(a, b) => Mediation::Multiple(lift(a), lift(b)),
            Mediation::Missing { reason } => Mediation::Missing { reason },
        }))
    }

    fn apex_json(&self, (u, q, z): &Self::Apex) -> Value {
        json!([self.inst.value_json(u), self.inst.value_json(q), self.inst.value_json(z)])
    }

    fn right_json(&self, (u, w): &Pair) -> Value {
        json!([self.inst.value_json(u), self.inst.value_json(w)])
    }

    fn down_json(&self, (v, z): &Pair) -> Value {
        json!([self.inst.value_json(v), self.inst.value_json(z)])
    }

    fn target_json(&self, t: &TValue) -> Value {
        self.inst.value_json(t)
    }
}
