//! Finite sets, functions between them, and cartesian products.
//!
//! Products are strict: a product set is the flat list of its atomic factors,
//! so `(X×Y)×Z`, `X×(Y×Z)` and `X×Y×Z` are the same value and the
//! associators are identities. Elements of a product are ordered
//! lexicographically with the last factor varying fastest; the index of
//! `(x, y)` in `X×Y` is `ix·|Y| + iy`. The unit set `I = {*}` is an atom, so
//! `X×I` is a genuine two-factor product related to `X` by a projection.

use std::borrow::Cow;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone)]
pub struct FinSet(Arc<Node>);

#[derive(PartialEq, Eq, Hash)]
enum Node {
    Atom { name: String, elements: Vec<String> },
    Product { factors: Vec<FinSet>, len: usize },
}

impl PartialEq for FinSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl Eq for FinSet {}

impl Hash for FinSet {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.hash(state)
    }
}

impl fmt::Debug for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{{{}}}", self.name(), self.elements().join(","))
    }
}

impl fmt::Display for FinSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FinSet {
    /// An atomic set with pairwise distinct labels.
    pub fn new(name: impl Into<String>, elements: Vec<String>) -> Result<Self> {
        let name = name.into();
        for (i, e) in elements.iter().enumerate() {
            if elements[..i].contains(e) {
                return Err(Error::InvalidSet(format!("duplicate label `{e}` in `{name}`")));
            }
        }
        Ok(FinSet(Arc::new(Node::Atom { name, elements })))
    }

    /// `name = {prefix1, …, prefixN}`.
    pub fn numbered(name: &str, prefix: &str, n: usize) -> Self {
        let elements = (1..=n).map(|i| format!("{prefix}{i}")).collect();
        FinSet::new(name, elements).expect("numbered labels are distinct")
    }

    /// The monoidal unit `I = {*}`.
    pub fn unit() -> Self {
        static UNIT: OnceLock<FinSet> = OnceLock::new();
        UNIT.get_or_init(|| FinSet::new("I", vec!["*".into()]).unwrap()).clone()
    }

    pub fn is_unit(&self) -> bool {
        *self == FinSet::unit()
    }

    pub fn is_atom(&self) -> bool {
        matches!(*self.0, Node::Atom { .. })
    }

    pub fn name(&self) -> Cow<'_, str> {
        match &*self.0 {
            Node::Atom { name, .. } => Cow::Borrowed(name),
            Node::Product { factors, .. } => {
                Cow::Owned(factors.iter().map(|f| f.name().into_owned()).collect::<Vec<_>>().join("×"))
            }
        }
    }

    pub fn len(&self) -> usize {
        match &*self.0 {
            Node::Atom { elements, .. } => elements.len(),
            Node::Product { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Label of element `i`; product elements print as `(a,b,…)`.
    pub fn label(&self, i: usize) -> String {
        match &*self.0 {
            Node::Atom { elements, .. } => elements[i].clone(),
            Node::Product { factors, .. } => {
                let parts: Vec<String> = self.split(i).iter().zip(factors).map(|(&j, f)| f.label(j)).collect();
                format!("({})", parts.join(","))
            }
        }
    }

    pub fn elements(&self) -> Vec<String> {
        (0..self.len()).map(|i| self.label(i)).collect()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        match &*self.0 {
            Node::Atom { elements, .. } => elements.iter().position(|e| e == label),
            Node::Product { .. } => (0..self.len()).find(|&i| self.label(i) == label),
        }
    }

    pub fn element(&self, i: usize) -> Result<Element> {
        if i < self.len() {
            Ok(Element { set: self.clone(), index: i })
        } else {
            Err(Error::ElementNotInSet { set: self.name().into_owned(), element: format!("#{i}") })
        }
    }

    pub fn element_by_label(&self, label: &str) -> Result<Element> {
        self.index_of(label)
            .map(|index| Element { set: self.clone(), index })
            .ok_or_else(|| Error::ElementNotInSet { set: self.name().into_owned(), element: label.to_string() })
    }

    /// The atomic factors; an atom is its own single coordinate.
    pub fn coords(&self) -> Vec<FinSet> {
        match &*self.0 {
            Node::Atom { .. } => vec![self.clone()],
            Node::Product { factors, .. } => factors.clone(),
        }
    }

    pub fn arity(&self) -> usize {
        match &*self.0 {
            Node::Atom { .. } => 1,
            Node::Product { factors, .. } => factors.len(),
        }
    }

    /// Coordinates of element `i`, one index per atomic factor.
    pub fn split(&self, mut i: usize) -> Vec<usize> {
        match &*self.0 {
            Node::Atom { .. } => vec![i],
            Node::Product { factors, .. } => {
                let mut out = vec![0; factors.len()];
                for (slot, f) in out.iter_mut().zip(factors).rev() {
                    let n = f.len();
                    *slot = i % n;
                    i /= n;
                }
                out
            }
        }
    }

    /// Inverse of [`FinSet::split`].
    pub fn join(&self, coords: &[usize]) -> usize {
        match &*self.0 {
            Node::Atom { .. } => coords[0],
            Node::Product { factors, .. } => coords.iter().zip(factors).fold(0, |acc, (&c, f)| acc * f.len() + c),
        }
    }

    pub fn times(&self, other: &FinSet) -> FinSet {
        product(&[self.clone(), other.clone()])
    }
}

/// Cartesian product, flattened into atomic factors. The empty product is `I`.
pub fn product(xs: &[FinSet]) -> FinSet {
    let mut atoms = Vec::new();
    for x in xs {
        match &*x.0 {
            Node::Atom { .. } => atoms.push(x.clone()),
            Node::Product { factors, .. } => atoms.extend(factors.iter().cloned()),
        }
    }
    match atoms.len() {
        0 => FinSet::unit(),
        1 => atoms.pop().unwrap(),
        _ => {
            let len = atoms.iter().map(FinSet::len).product();
            FinSet(Arc::new(Node::Product { factors: atoms, len }))
        }
    }
}

/// An element of a finite set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Element {
    pub set: FinSet,
    pub index: usize,
}

impl Element {
    pub fn label(&self) -> String {
        self.set.label(self.index)
    }
}

/// A total function between finite sets.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinFun {
    dom: FinSet,
    cod: FinSet,
    map: Vec<usize>,
}

impl FinFun {
    pub fn new(dom: FinSet, cod: FinSet, map: Vec<usize>) -> Result<Self> {
        if map.len() != dom.len() {
            return Err(Error::TypeMismatch(format!(
                "function table has {} entries, domain `{}` has {}",
                map.len(),
                dom,
                dom.len()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&j| j >= cod.len()) {
            return Err(Error::ElementNotInSet { set: cod.name().into_owned(), element: format!("#{bad}") });
        }
        Ok(FinFun { dom, cod, map })
    }

    pub fn from_fn(dom: &FinSet, cod: &FinSet, f: impl Fn(usize) -> usize) -> Result<Self> {
        let map = (0..dom.len()).map(f).collect();
        FinFun::new(dom.clone(), cod.clone(), map)
    }

    pub fn identity(x: &FinSet) -> Self {
        FinFun { dom: x.clone(), cod: x.clone(), map: (0..x.len()).collect() }
    }

    /// The unique map to `I`.
    pub fn to_unit(x: &FinSet) -> Self {
        FinFun { dom: x.clone(), cod: FinSet::unit(), map: vec![0; x.len()] }
    }

    /// Projection of a product onto the listed coordinates, in the listed order.
    pub fn projection(dom: &FinSet, coords: &[usize]) -> Result<Self> {
        let atoms = dom.coords();
        if let Some(&bad) = coords.iter().find(|&&c| c >= atoms.len()) {
            return Err(Error::InvalidBlock(format!(
                "coordinate {bad} out of range for `{dom}` with {} factors",
                atoms.len()
            )));
        }
        let cod = product(&coords.iter().map(|&c| atoms[c].clone()).collect::<Vec<_>>());
        let map = (0..dom.len())
            .map(|i| {
                let parts = dom.split(i);
                let picked: Vec<usize> = coords.iter().map(|&c| parts[c]).collect();
                cod.join(&picked)
            })
            .collect();
        Ok(FinFun { dom: dom.clone(), cod, map })
    }

    /// `x ↦ (f₁(x), …, fₙ(x))`.
    pub fn pairing(fs: &[FinFun]) -> Result<Self> {
        let dom = match fs.first() {
            Some(f) => f.dom.clone(),
            None => return Err(Error::TypeMismatch("pairing of no functions".into())),
        };
        if let Some(f) = fs.iter().find(|f| f.dom != dom) {
            return Err(Error::TypeMismatch(format!("pairing domains `{}` and `{dom}`", f.dom)));
        }
        let cod = product(&fs.iter().map(|f| f.cod.clone()).collect::<Vec<_>>());
        let map = (0..dom.len())
            .map(|i| {
                let parts: Vec<usize> = fs.iter().flat_map(|f| f.cod.split(f.map[i])).collect();
                cod.join(&parts)
            })
            .collect();
        Ok(FinFun { dom, cod, map })
    }

    /// `f × g : X×X' → Y×Y'`.
    pub fn times(&self, other: &FinFun) -> FinFun {
        let dom = self.dom.times(&other.dom);
        let cod = self.cod.times(&other.cod);
        let n = other.dom.len();
        let m = other.cod.len();
        let map = (0..dom.len()).map(|i| self.map[i / n] * m + other.map[i % n]).collect();
        FinFun { dom, cod, map }
    }

    /// The `n`-fold diagonal `X → Xⁿ`.
    pub fn diagonal(x: &FinSet, n: usize) -> FinFun {
        if n == 0 {
            return FinFun::to_unit(x);
        }
        FinFun::pairing(&vec![FinFun::identity(x); n]).expect("same domain")
    }

    /// `X×Y → Y×X`, where `X` and `Y` may themselves be products.
    pub fn swap(x: &FinSet, y: &FinSet) -> FinFun {
        let dom = x.times(y);
        let cod = y.times(x);
        let ny = y.len();
        let nx = x.len();
        let map = (0..dom.len()).map(|i| (i % ny) * nx + i / ny).collect();
        FinFun { dom, cod, map }
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &FinFun) -> Result<FinFun> {
        if f.cod != self.dom {
            return Err(Error::TypeMismatch(format!(
                "cannot compose `{}`→`{}` after `{}`→`{}`",
                self.dom, self.cod, f.dom, f.cod
            )));
        }
        Ok(FinFun { dom: f.dom.clone(), cod: self.cod.clone(), map: f.map.iter().map(|&j| self.map[j]).collect() })
    }

    pub fn dom(&self) -> &FinSet {
        &self.dom
    }

    pub fn cod(&self) -> &FinSet {
        &self.cod
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn table(&self) -> &[usize] {
        &self.map
    }
}

/// All `|cod|^|dom|` functions, in lexicographic order of their tables.
pub fn enumerate_functions(dom: &FinSet, cod: &FinSet) -> Result<impl Iterator<Item = FinFun> + 'static> {
    if cod.is_empty() && !dom.is_empty() {
        return Err(Error::EmptyCodomain);
    }
    let dom = dom.clone();
    let cod = cod.clone();
    let n = dom.len();
    let k = cod.len();
    let mut next = Some(vec![0usize; n]);
    Ok(std::iter::from_fn(move || {
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
        Some(FinFun { dom: dom.clone(), cod: cod.clone(), map: current })
    }))
}

/// JSON form: `{"name": "X", "elements": [...]}` for atoms and
/// `{"factors": [...]}` for products.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FinSetJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<FinSetJson>>,
}

impl FinSet {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_json_repr()).expect("finset serializes")
    }

    fn to_json_repr(&self) -> FinSetJson {
        match &*self.0 {
            Node::Atom { name, elements } => {
                FinSetJson { name: Some(name.clone()), elements: Some(elements.clone()), factors: None }
            }
            Node::Product { factors, .. } => FinSetJson {
                name: None,
                elements: None,
                factors: Some(factors.iter().map(FinSet::to_json_repr).collect()),
            },
        }
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let repr: FinSetJson =
            serde_json::from_value(value.clone()).map_err(|e| Error::Parse(format!("finite set JSON: {e}")))?;
        FinSet::from_json_repr(&repr)
    }

    fn from_json_repr(repr: &FinSetJson) -> Result<Self> {
        match (&repr.elements, &repr.factors) {
            (Some(elements), None) => FinSet::new(repr.name.clone().unwrap_or_default(), elements.clone()),
            (None, Some(factors)) => {
                let fs = factors.iter().map(FinSet::from_json_repr).collect::<Result<Vec<_>>>()?;
                Ok(product(&fs))
            }
            _ => Err(Error::Parse("finite set JSON needs exactly one of `elements` or `factors`".into())),
        }
    }
}
