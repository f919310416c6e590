//! Finite commutative monoids given by Cayley tables.
//!
//! A monoid is a group exactly when its associativity square
//!
//! ```text
//!   M×M×M --(m×id)--> M×M
//!     |                 |
//!  (id×m)               m
//!     v                 v
//!    M×M  ------m----> M
//! ```
//!
//! is a pullback. [`is_group`] and [`assoc_square_is_pullback`] decide the two
//! sides by unrelated searches so that their agreement is a real check.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::report::{CheckReport, Mode, Verdict};

/// A finite monoid `(M, ·, e)` with elements addressed by index.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FiniteMonoid {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    name: String,
    elements: Vec<String>,
    unit: usize,
    table: Vec<Vec<usize>>,
}

impl FiniteMonoid {
    /// Builds a monoid and checks closure, unit, associativity and commutativity.
    pub fn new(name: impl Into<String>, elements: Vec<String>, unit: usize, table: Vec<Vec<usize>>) -> Result<Self> {
        let m = Self::new_unchecked(name, elements, unit, table);
        m.validate()?;
        Ok(m)
    }

    /// Builds a table without validating it. Law suites use this to exercise
    /// their failure paths on deliberately broken instances.
    pub fn new_unchecked(name: impl Into<String>, elements: Vec<String>, unit: usize, table: Vec<Vec<usize>>) -> Self {
        FiniteMonoid { name: name.into(), elements, unit, table }
    }

    /// Builds a monoid from a binary operation on `0..n`.
    pub fn from_fn(name: &str, labels: &[&str], unit: usize, op: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let n = labels.len();
        let table = (0..n).map(|a| (0..n).map(|b| op(a, b)).collect()).collect();
        Self::new(name, labels.iter().map(|s| s.to_string()).collect(), unit, table)
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let m: FiniteMonoid =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(format!("monoid JSON: {e}")))?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("monoid serializes")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn label(&self, i: usize) -> &str {
        &self.elements[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == label)
    }

    pub fn unit(&self) -> usize {
        self.unit
    }

    /// `a · b`. Panics on out-of-range indices.
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.elements.len();
        let bad = |msg: String| Err(Error::InvalidMonoid(msg));
        if n == 0 {
            return bad("no elements".into());
        }
        for (i, e) in self.elements.iter().enumerate() {
            if self.elements[..i].contains(e) {
                return bad(format!("duplicate label `{e}`"));
            }
        }
        if self.unit >= n {
            return bad(format!("unit index {} out of range", self.unit));
        }
        if self.table.len() != n || self.table.iter().any(|row| row.len() != n) {
            return bad(format!("table is not {n}×{n}"));
        }
        if let Some((a, b)) = pairs(n).find(|&(a, b)| self.table[a][b] >= n) {
            return bad(format!("table not closed at ({a},{b})"));
        }
        let e = self.unit;
        if let Some(m) = (0..n).find(|&m| self.mul(m, e) != m || self.mul(e, m) != m) {
            return bad(format!("unit law fails at `{}`", self.elements[m]));
        }
        if let Some((a, b)) = pairs(n).find(|&(a, b)| self.mul(a, b) != self.mul(b, a)) {
            return bad(format!("not commutative at ({}, {})", self.elements[a], self.elements[b]));
        }
        for (a, b) in pairs(n) {
            for c in 0..n {
                if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                    return bad(format!(
                        "not associative at ({}, {}, {})",
                        self.elements[a], self.elements[b], self.elements[c]
                    ));
                }
            }
        }
        Ok(())
    }
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |a| (0..n).map(move |b| (a, b)))
}

/// Outcome of [`is_group`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupVerdict {
    pub is_group: bool,
    /// First element (in table order) without a two-sided inverse.
    pub non_invertible: Option<usize>,
}

/// A cone `(a, g, h, c)` with `a·g = h·c` over the associativity cospan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonoidCone {
    pub a: usize,
    pub g: usize,
    pub h: usize,
    pub c: usize,
    /// Every `b` with `g = b·c` and `h = a·b`.
    pub mediators: Vec<usize>,
}

/// Outcome of [`assoc_square_is_pullback`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PullbackVerdict {
    pub is_pullback: bool,
    /// A cone with zero or several mediating elements.
    pub witness: Option<MonoidCone>,
}

/// Decides whether every element has a two-sided inverse.
pub fn is_group(m: &FiniteMonoid) -> Result<GroupVerdict> {
    m.validate()?;
    let n = m.len();
    let e = m.unit();
    let missing = (0..n).find(|&a| !(0..n).any(|b| m.mul(a, b) == e && m.mul(b, a) == e));
    Ok(GroupVerdict { is_group: missing.is_none(), non_invertible: missing })
}

fn cone(m: &FiniteMonoid, a: usize, g: usize, h: usize, c: usize) -> MonoidCone {
    let mediators = (0..m.len()).filter(|&b| m.mul(b, c) == g && m.mul(a, b) == h).collect();
    MonoidCone { a, g, h, c, mediators }
}

/// Decides whether the associativity square is a pullback of sets.
///
/// Scans every quadruple `(a, g, h, c)` with `a·g = h·c` and counts the
/// `b` with `g = b·c` and `h = a·b`. The reported witness prefers the cones
/// `(a, e, e, a)`, whose mediators are exactly the inverses of `a`, then any
/// cone with no mediator, then any cone with several.
pub fn assoc_square_is_pullback(m: &FiniteMonoid) -> Result<PullbackVerdict> {
    m.validate()?;
    let n = m.len();
    let e = m.unit();

    let inverse_cone = (0..n).map(|a| cone(m, a, e, e, a)).find(|k| k.mediators.len() != 1);

    let mut missing = None;
    let mut multiple = None;
    for a in 0..n {
        for g in 0..n {
            for h in 0..n {
                for c in 0..n {
                    if m.mul(a, g) != m.mul(h, c) {
                        continue;
                    }
                    let k = cone(m, a, g, h, c);
                    match k.mediators.len() {
                        0 if missing.is_none() => missing = Some(k),
                        1 | 0 => {}
                        _ if multiple.is_none() => multiple = Some(k),
                        _ => {}
                    }
                }
            }
        }
    }
    let witness = inverse_cone.or(missing).or(multiple);
    Ok(PullbackVerdict { is_pullback: witness.is_none(), witness })
}

/// Runs both deciders on every monoid and passes iff they agree everywhere.
pub fn group_pullback_agreement(suite: &[FiniteMonoid]) -> Result<CheckReport> {
    let mut rows = Vec::new();
    let mut disagreement = None;
    for m in suite {
        let g = is_group(m)?;
        let p = assoc_square_is_pullback(m)?;
        let row = json!({
            "monoid": m.name(),
            "is_group": g.is_group,
            "non_invertible": g.non_invertible.map(|i| m.label(i).to_string()),
            "assoc_pullback": p.is_pullback,
            "cone": p.witness.as_ref().map(|k| cone_json(m, k)),
        });
        if g.is_group != p.is_pullback && disagreement.is_none() {
            disagreement = Some(row.clone());
        }
        rows.push(row);
    }
    let verdict = if disagreement.is_some() { Verdict::Fail } else { Verdict::Pass };
    let mut report = CheckReport::new(
        "monoid-group-pullback",
        "a finite commutative monoid is a group iff its associativity square is a pullback",
        Mode::Exhaustive,
    );
    report.verdict = verdict;
    report.trials = suite.len() as u64;
    report.witness = disagreement;
    report.details = Some(serde_json::Value::Array(rows));
    Ok(report)
}

pub fn cone_json(m: &FiniteMonoid, k: &MonoidCone) -> serde_json::Value {
    json!({
        "a": m.label(k.a),
        "g": m.label(k.g),
        "h": m.label(k.h),
        "c": m.label(k.c),
        "mediators": k.mediators.iter().map(|&b| m.label(b)).collect::<Vec<_>>(),
    })
}

fn cyclic(n: usize) -> FiniteMonoid {
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    FiniteMonoid::from_fn(&format!("Z{n}"), &refs, 0, |a, b| (a + b) % n).expect("cyclic group")
}

fn mult_mod(n: usize) -> FiniteMonoid {
    let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    let refs: Vec<&str> = labels.iter().map(String::as_str).collect();
    FiniteMonoid::from_fn(&format!("Z{n}mul"), &refs, 1, |a, b| (a * b) % n).expect("multiplicative monoid")
}

/// The bundled monoids, all commutative and of order at most four.
///
/// | name    | carrier        | operation          | group |
/// |---------|----------------|--------------------|-------|
/// | Z1..Z4  | ℤ/n            | addition           | yes   |
/// | Z2xZ2   | ℤ/2 × ℤ/2      | addition           | yes   |
/// | AND     | {0,1}          | conjunction        | no    |
/// | Z3mul   | ℤ/3            | multiplication     | no    |
/// | Z4mul   | ℤ/4            | multiplication     | no    |
/// | max3    | {0,1,2}        | maximum            | no    |
/// | trunc3  | {0,1,2}        | addition capped at 2 | no  |
pub fn library() -> Vec<FiniteMonoid> {
    let klein = FiniteMonoid::from_fn("Z2xZ2", &["00", "01", "10", "11"], 0, |a, b| a ^ b).expect("Klein four-group");
    let and = FiniteMonoid::from_fn("AND", &["0", "1"], 1, |a, b| a & b).expect("AND monoid");
    let max3 = FiniteMonoid::from_fn("max3", &["0", "1", "2"], 0, usize::max).expect("max");
    let trunc3 = FiniteMonoid::from_fn("trunc3", &["0", "1", "2"], 0, |a, b| (a + b).min(2)).expect("trunc");
    vec![cyclic(1), cyclic(2), cyclic(3), cyclic(4), klein, and, mult_mod(3), mult_mod(4), max3, trunc3]
}

/// Looks up a bundled monoid by name.
pub fn named(name: &str) -> Option<FiniteMonoid> {
    library().into_iter().find(|m| m.name() == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn and() -> FiniteMonoid {
        named("AND").unwrap()
    }

    #[test]
    fn z3_is_group() {
        let v = is_group(&named("Z3").unwrap()).unwrap();
        assert!(v.is_group);
        assert_eq!(v.non_invertible, None);
    }

    #[test]
    fn and_is_not_group() {
        let m = and();
        let v = is_group(&m).unwrap();
        assert!(!v.is_group);
        assert_eq!(m.label(v.non_invertible.unwrap()), "0");
    }

    #[test]
    fn z4_mul_witness_zero() {
        let m = named("Z4mul").unwrap();
        let v = is_group(&m).unwrap();
        assert!(!v.is_group);
        assert_eq!(m.label(v.non_invertible.unwrap()), "0");
    }

    #[test]
    fn and_pullback_witness() {
        let m = and();
        let p = assoc_square_is_pullback(&m).unwrap();
        assert!(!p.is_pullback);
        let k = p.witness.unwrap();
        let labels: Vec<&str> = [k.a, k.g, k.h, k.c].iter().map(|&i| m.label(i)).collect();
        assert_eq!(labels, ["0", "1", "1", "0"]);
        assert!(k.mediators.is_empty());
    }

    #[test]
    fn z3_pullback() {
        assert!(assoc_square_is_pullback(&named("Z3").unwrap()).unwrap().is_pullback);
    }

    #[test]
    fn trivial_monoid_pullback() {
        let p = assoc_square_is_pullback(&named("Z1").unwrap()).unwrap();
        assert!(p.is_pullback);
    }

    #[test]
    fn invalid_monoids_rejected() {
        // unit law broken
        let r = FiniteMonoid::new("bad", vec!["a".into(), "b".into()], 0, vec![vec![1, 1], vec![1, 1]]);
        assert!(matches!(r, Err(Error::InvalidMonoid(_))));
        // not closed
        let r = FiniteMonoid::new("bad", vec!["a".into()], 0, vec![vec![3]]);
        assert!(matches!(r, Err(Error::InvalidMonoid(_))));
        // not commutative: left-zero band with adjoined unit
        let r = FiniteMonoid::new(
            "bad",
            vec!["e".into(), "x".into(), "y".into()],
            0,
            vec![vec![0, 1, 2], vec![1, 1, 1], vec![2, 2, 2]],
        );
        assert!(matches!(r, Err(Error::InvalidMonoid(_))));
        let broken = FiniteMonoid::new_unchecked("bad", vec!["a".into()], 2, vec![vec![0]]);
        assert!(is_group(&broken).is_err());
        assert!(assoc_square_is_pullback(&broken).is_err());
    }

    #[test]
    fn library_is_large_enough() {
        let lib = library();
        assert!(lib.len() >= 8);
        assert!(lib.iter().all(|m| m.len() <= 4));
        assert!(lib.iter().any(|m| is_group(m).unwrap().is_group));
        assert!(lib.iter().any(|m| !is_group(m).unwrap().is_group));
    }

    #[test]
    fn agreement_examples() {
        let names = ["Z1", "Z2", "Z3", "Z2xZ2", "AND", "Z4mul", "max3"];
        let suite: Vec<_> = names.iter().map(|n| named(n).unwrap()).collect();
        assert_eq!(group_pullback_agreement(&suite).unwrap().verdict, Verdict::Pass);
        assert_eq!(group_pullback_agreement(&[]).unwrap().verdict, Verdict::Pass);
        assert_eq!(group_pullback_agreement(&[and()]).unwrap().verdict, Verdict::Pass);
        assert_eq!(group_pullback_agreement(&library()).unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn json_roundtrip() {
        let m = named("Z4mul").unwrap();
        let back = FiniteMonoid::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        let raw = serde_json::json!({"elements": ["e"], "unit": 0, "table": [[0]]});
        assert_eq!(FiniteMonoid::from_json(&raw).unwrap().len(), 1);
    }
}
