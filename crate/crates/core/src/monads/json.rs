//! JSON forms of monad values.
//!
//! Inside kernels a column is written without its monad and base:
//! `{"y1":"1/2"}` for weights (zeros omitted), `["y1"]` for subsets,
//! `{"a":"1","x":"y1"}` for writer values, `{"y1":2}` for multiplicities and
//! `"y1"` for the identity monad.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::exactnum::Rat;
use crate::finset::FinSet;

use super::instance::{MonadInstance, MonadKind};
use super::value::{Payload, TValue};

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

fn index(base: &FinSet, label: &str) -> Result<usize> {
    base.index_of(label)
        .ok_or_else(|| Error::ElementNotInSet { set: base.name().into_owned(), element: label.to_string() })
}

impl MonadInstance {
    /// Column form of `t`, as used inside kernel JSON.
    pub fn payload_json(&self, t: &TValue) -> Value {
        let base = t.base();
        match t.payload() {
            Payload::Point(i) => Value::String(base.label(*i)),
            Payload::Weights(w) => Value::Object(
                w.iter()
                    .enumerate()
                    .filter(|(_, r)| !r.is_zero())
                    .map(|(i, r)| (base.label(i), Value::String(r.to_string())))
                    .collect(),
            ),
            Payload::Subset(s) => Value::Array(
                s.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| Value::String(base.label(i))).collect(),
            ),
            Payload::Tagged { tag, point } => {
                let a = match self.kind() {
                    MonadKind::Writer(m) => m.label(*tag).to_string(),
                    _ => tag.to_string(),
                };
                json!({ "a": a, "x": base.label(*point) })
            }
            Payload::Multiset(v) => Value::Object(
                v.iter().enumerate().filter(|(_, &n)| n != 0).map(|(i, &n)| (base.label(i), Value::from(n))).collect(),
            ),
        }
    }

    /// Inverse of [`MonadInstance::payload_json`]; validates the result.
    pub fn payload_from_json(&self, base: &FinSet, value: &Value) -> Result<TValue> {
        let n = base.len();
        let payload = match self.kind() {
            MonadKind::Identity => {
                let label = value.as_str().ok_or_else(|| parse_err("identity value must be a label"))?;
                Payload::Point(index(base, label)?)
            }
            MonadKind::Distribution | MonadKind::Measure | MonadKind::NonZeroMeasure => {
                let obj = value.as_object().ok_or_else(|| parse_err("measure must be an object"))?;
                let mut w = vec![Rat::zero(); n];
                for (label, r) in obj {
                    let text = match r {
                        Value::String(s) => s.clone(),
                        Value::Number(k) if k.is_i64() => k.to_string(),
                        _ => return Err(parse_err(format!("weight of `{label}` must be a rational string"))),
                    };
                    w[index(base, label)?] = text.parse()?;
                }
                Payload::Weights(w)
            }
            MonadKind::Powerset | MonadKind::NonEmptyPowerset => {
                let arr = value.as_array().ok_or_else(|| parse_err("subset must be a list"))?;
                let mut s = vec![false; n];
                for label in arr {
                    let label = label.as_str().ok_or_else(|| parse_err("subset entries must be labels"))?;
                    s[index(base, label)?] = true;
                }
                Payload::Subset(s)
            }
            MonadKind::Writer(m) => {
                let a = value
                    .get("a")
                    .and_then(Value::as_str)
                    .ok_or_else(|| parse_err("writer value needs a string field `a`"))?;
                let x = value
                    .get("x")
                    .and_then(Value::as_str)
                    .ok_or_else(|| parse_err("writer value needs a string field `x`"))?;
                let tag =
                    m.index_of(a).ok_or_else(|| Error::ElementNotInSet { set: m.name().into(), element: a.into() })?;
                Payload::Tagged { tag, point: index(base, x)? }
            }
            MonadKind::FreeAbelian { .. } => {
                let obj = value.as_object().ok_or_else(|| parse_err("multiset must be an object"))?;
                let mut v = vec![0; n];
                for (label, k) in obj {
                    v[index(base, label)?] =
                        k.as_i64().ok_or_else(|| parse_err(format!("multiplicity of `{label}` must be an integer")))?;
                }
                Payload::Multiset(v)
            }
        };
        self.value(base, payload)
    }

    /// Standalone form: `{"monad":"M*","base":"X","entries":{...}}`.
    pub fn value_json(&self, t: &TValue) -> Value {
        let mut obj = Map::new();
        obj.insert("monad".into(), Value::String(self.id()));
        obj.insert("base".into(), Value::String(t.base().name().into_owned()));
        let body = self.payload_json(t);
        match t.payload() {
            Payload::Point(_) => {
                obj.insert("point".into(), body);
            }
            Payload::Weights(_) => {
                obj.insert("entries".into(), body);
            }
            Payload::Subset(_) => {
                obj.insert("elements".into(), body);
            }
            Payload::Tagged { .. } => {
                if let Value::Object(m) = body {
                    obj.extend(m);
                }
            }
            Payload::Multiset(_) => {
                obj.insert("multiplicities".into(), body);
            }
        }
        Value::Object(obj)
    }

    /// Reads a standalone value over `base`; the `base` field, if present,
    /// must name that set.
    pub fn value_from_json(&self, base: &FinSet, value: &Value) -> Result<TValue> {
        if let Some(m) = value.get("monad").and_then(Value::as_str) {
            if m != self.id() {
                return Err(Error::TypeMismatch(format!("value of monad `{m}` read as `{}`", self.id())));
            }
        }
        if let Some(b) = value.get("base").and_then(Value::as_str) {
            if b != base.name() {
                return Err(Error::TypeMismatch(format!("value over `{b}` read over `{base}`")));
            }
        }
        let body = match self.kind() {
            MonadKind::Identity => value.get("point"),
            MonadKind::Distribution | MonadKind::Measure | MonadKind::NonZeroMeasure => value.get("entries"),
            MonadKind::Powerset | MonadKind::NonEmptyPowerset => value.get("elements"),
            MonadKind::Writer(_) => Some(value),
            MonadKind::FreeAbelian { .. } => value.get("multiplicities"),
        };
        let body = body.ok_or_else(|| parse_err(format!("missing payload field for monad `{}`", self.id())))?;
        self.payload_from_json(base, body)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measure_json_shape() {
        let x = FinSet::new("X", vec!["x1".into(), "x2".into()]).unwrap();
        let m = MonadInstance::nonzero_measure();
        let t = m.weights(&x, vec![Rat::new(1, 2), Rat::from_integer(3)]).unwrap();
        assert_eq!(m.value_json(&t), json!({"monad":"M*","base":"X","entries":{"x1":"1/2","x2":"3"}}));
        assert_eq!(m.value_from_json(&x, &m.value_json(&t)).unwrap(), t);
    }

    #[test]
    fn round_trip_every_instance() {
        let x = FinSet::numbered("X", "x", 3);
        for inst in MonadInstance::all_bundled() {
            for trial in 0..20 {
                let t = inst.sample(&x, &mut crate::trial_rng(5, trial)).unwrap();
                assert_eq!(inst.value_from_json(&x, &inst.value_json(&t)).unwrap(), t);
                assert_eq!(inst.payload_from_json(&x, &inst.payload_json(&t)).unwrap(), t);
            }
        }
    }

    #[test]
    fn rejects_bad_values() {
        let x = FinSet::numbered("X", "x", 2);
        let ms = MonadInstance::nonzero_measure();
        assert!(ms.payload_from_json(&x, &json!({})).is_err());
        assert!(ms.payload_from_json(&x, &json!({"zz": "1"})).is_err());
        let p = MonadInstance::nonempty_powerset();
        assert!(p.payload_from_json(&x, &json!([])).is_err());
    }
}
