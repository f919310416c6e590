//! Affine / weakly affine classification via the internal monoid `T1`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactnum::Rat;
use crate::finset::FinSet;
use crate::report::{CheckReport, Mode};

use super::instance::MonadInstance;
use super::value::{Payload, TValue};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Affinity {
    /// `T1 ≅ 1`: the Kleisli category is Markov.
    Affine,
    /// `T1` is a non-trivial group: weakly Markov, not Markov.
    WeaklyAffineNotAffine,
    /// Some scalar in `T1` has no inverse.
    NotWeaklyAffine,
}

impl Affinity {
    pub fn is_weakly_affine(self) -> bool {
        self != Affinity::NotWeaklyAffine
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Affinity::Affine => "affine",
            Affinity::WeaklyAffineNotAffine => "weakly-affine-not-affine",
            Affinity::NotWeaklyAffine => "not-weakly-affine",
        }
    }
}

impl std::fmt::Display for Affinity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub monad: String,
    pub affinity: Affinity,
    pub mode: Mode,
    /// Number of scalars of `T1` examined.
    pub examined: u64,
    /// A non-invertible scalar, or for weakly affine non-affine monads a
    /// scalar other than `η(*)`.
    pub witness: Option<Value>,
    pub notes: Vec<String>,
}

impl Classification {
    pub fn to_check(&self) -> CheckReport {
        let mut c = CheckReport::new(
            format!("classify:{}", self.monad),
            "the internal monoid T1 is trivial (affine) or a group (weakly affine)",
            self.mode,
        );
        c.trials = self.examined;
        c.witness = self.witness.clone();
        c.notes = self.notes.clone();
        c.details = Some(json!({ "class": self.affinity.as_str() }));
        c
    }
}

/// Probe scalars for instances without an enumerator: every `p/q` with
/// `p ≤ max_numerator`, `q ≤ max_denominator` that the instance accepts,
/// deduplicated, plus `η(*)`.
fn probe_scalars(inst: &MonadInstance) -> Vec<TValue> {
    let one = FinSet::unit();
    let s = inst.sampler();
    let mut out = vec![inst.scalar_one()];
    for p in 0..=s.max_numerator as i64 {
        for q in 1..=s.max_denominator.max(1) as i64 {
            if let Ok(t) = inst.weights(&one, vec![Rat::new(p, q)]) {
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
    }
    out
}

/// Readable form of a scalar: `"0"`, `2`, `[]`, a monoid label or `"*"`.
pub fn scalar_json(inst: &MonadInstance, a: &TValue) -> Value {
    match a.payload() {
        Payload::Point(_) => json!("*"),
        Payload::Weights(w) => json!(w[0].to_string()),
        Payload::Subset(s) => json!(if s[0] { vec!["*"] } else { vec![] }),
        Payload::Tagged { .. } => inst.payload_json(a)["a"].clone(),
        Payload::Multiset(v) => json!(v[0]),
    }
}

fn absorbing(inst: &MonadInstance, a: &TValue, all: &[TValue]) -> Result<bool> {
    for b in all {
        match inst.scalar_mul(a, b) {
            Ok(p) if &p == a => {}
            Ok(_) | Err(Error::OutOfBound { .. }) => return Ok(false),
            Err(e) => return Err(e),
        }
    }
    Ok(true)
}

/// Decides where `inst` sits: exhaustively over `T1` when it is enumerable,
/// otherwise over the probe grid with the reciprocal solver, flagged
/// solver-asserted.
pub fn classify(inst: &MonadInstance) -> Result<Classification> {
    let one = FinSet::unit();
    let unit = inst.scalar_one();
    let (scalars, mode) = if inst.is_enumerable() {
        (inst.enumerate(&one)?.collect::<Vec<_>>(), Mode::Exhaustive)
    } else if inst.has_scalar_solver() {
        (probe_scalars(inst), Mode::SolverAsserted)
    } else {
        return Err(Error::UndecidableWithoutSolver(inst.id()));
    };

    let mut non_invertible = Vec::new();
    for a in &scalars {
        if inst.scalar_inverse(a)?.is_none() {
            non_invertible.push(a);
        }
    }
    let mut notes = Vec::new();
    if mode == Mode::SolverAsserted {
        notes.push(format!(
            "solver-asserted: T1 is infinite; decided over {} probe scalars with the reciprocal solver",
            scalars.len()
        ));
    }

    let (affinity, witness) = if let Some(first) = non_invertible.first() {
        // An absorbing zero is the obvious obstruction, but a non-absorbing
        // one says more; prefer it when it exists.
        let mut chosen = *first;
        for a in &non_invertible {
            if !absorbing(inst, a, &scalars)? {
                chosen = a;
                break;
            }
        }
        let w = json!({
            "scalar": scalar_json(inst, chosen),
            "reason": "no b in T1 with a·b = η(*)",
        });
        (Affinity::NotWeaklyAffine, Some(w))
    } else if let Some(other) = scalars.iter().find(|a| **a != unit) {
        let w = json!({ "scalar": scalar_json(inst, other), "reason": "invertible scalar other than η(*)" });
        (Affinity::WeaklyAffineNotAffine, Some(w))
    } else {
        (Affinity::Affine, None)
    };

    Ok(Classification { monad: inst.id(), affinity, mode, examined: scalars.len() as u64, witness, notes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(id: &str) -> Classification {
        classify(&MonadInstance::parse(id).unwrap()).unwrap()
    }

    #[test]
    fn bundled_table() {
        let expected = [
            ("Id", Affinity::Affine),
            ("D", Affinity::Affine),
            ("M", Affinity::NotWeaklyAffine),
            ("M*", Affinity::WeaklyAffineNotAffine),
            ("P", Affinity::NotWeaklyAffine),
            ("P*", Affinity::Affine),
            ("writer:Z2", Affinity::WeaklyAffineNotAffine),
            ("writer:Z3", Affinity::WeaklyAffineNotAffine),
            ("writer:AND", Affinity::NotWeaklyAffine),
            ("F", Affinity::NotWeaklyAffine),
        ];
        for (id, a) in expected {
            assert_eq!(class(id).affinity, a, "{id}");
        }
    }

    #[test]
    fn witnesses() {
        assert_eq!(class("M").witness.unwrap()["scalar"], json!("0"));
        assert_eq!(class("F").witness.unwrap()["scalar"], json!(2));
        assert_eq!(class("P").witness.unwrap()["scalar"], json!([]));
        assert_eq!(class("writer:AND").witness.unwrap()["scalar"], json!("0"));
        assert_eq!(class("M*").mode, Mode::SolverAsserted);
        assert_eq!(class("P").mode, Mode::Exhaustive);
    }

    #[test]
    fn writer_matches_group_test() {
        for m in crate::exactnum::library() {
            let g = crate::exactnum::is_group(&m).unwrap().is_group;
            let c = classify(&MonadInstance::writer(m)).unwrap();
            assert_eq!(c.affinity.is_weakly_affine(), g);
        }
    }
}
