//! Marginals and conditional independence of kernels into products.
//!
//! A kernel `f : A → X₁×…×Xₙ` exhibits conditional independence of the
//! blocks of a partition when it factors as
//! `reindex ∘ (g₁⊗…⊗gₙ) ∘ copyⁿ`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exactnum::Rat;
use crate::finset::{product, FinFun, FinSet};
use crate::gscat::{equivalent, mass, scalar_action, tensor_all, Kernel};
use crate::monads::{classify, MonadInstance, TValue};
use crate::report::{CheckReport, Mode, Verdict};

/// Ordered blocks of coordinates of a flattened product.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Blocks must be non-empty, disjoint and cover `0..arity`.
    pub fn new(blocks: Vec<Vec<usize>>, arity: usize) -> Result<Self> {
        let mut seen = vec![false; arity];
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::InvalidBlock("empty block".into()));
            }
            for &c in b {
                if c >= arity {
                    return Err(Error::InvalidBlock(format!("coordinate {c} out of range for arity {arity}")));
                }
                if std::mem::replace(&mut seen[c], true) {
                    return Err(Error::InvalidBlock(format!("coordinate {c} appears twice")));
                }
            }
        }
        if let Some(c) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidBlock(format!("coordinate {c} is in no block")));
        }
        Ok(Partition { blocks })
    }

    /// One block per coordinate.
    pub fn singletons(arity: usize) -> Self {
        Partition { blocks: (0..arity).map(|c| vec![c]).collect() }
    }

    /// Parses `"X,Y|Z"`: blocks separated by `|`, coordinates by `,`, each
    /// given by atom name or by index.
    pub fn parse(expr: &str, cod: &FinSet) -> Result<Self> {
        let atoms = cod.coords();
        let mut blocks = Vec::new();
        for block in expr.split('|') {
            let mut coords = Vec::new();
            for tok in block.split(',').map(str::trim) {
                if tok.is_empty() {
                    return Err(Error::InvalidBlock(format!("empty coordinate in `{expr}`")));
                }
                let by_name: Vec<usize> =
                    atoms.iter().enumerate().filter(|(_, a)| a.name() == tok).map(|(i, _)| i).collect();
                let c = match by_name.as_slice() {
                    [i] => *i,
                    [] => tok
                        .parse::<usize>()
                        .map_err(|_| Error::InvalidBlock(format!("no factor named `{tok}` in `{cod}`")))?,
                    _ => return Err(Error::InvalidBlock(format!("factor name `{tok}` is ambiguous; use indices"))),
                };
                coords.push(c);
            }
            blocks.push(coords);
        }
        Partition::new(blocks, atoms.len())
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn to_expr(&self, cod: &FinSet) -> String {
        let atoms = cod.coords();
        self.blocks
            .iter()
            .map(|b| b.iter().map(|&c| atoms[c].name().into_owned()).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// `f` followed by discarding every coordinate outside `block`.
pub fn marginal(f: &Kernel, block: &[usize]) -> Result<Kernel> {
    if block.is_empty() {
        return Err(Error::InvalidBlock("empty block".into()));
    }
    f.post(&FinFun::projection(f.cod(), block)?)
}

/// `reindex ∘ (g₁⊗…⊗gₙ) ∘ copyⁿ`, landing in `cod` with its original
/// coordinate order.
pub fn assemble(factors: &[Kernel], partition: &Partition, cod: &FinSet) -> Result<Kernel> {
    let first = factors.first().ok_or_else(|| Error::InvalidBlock("no factors".into()))?;
    let inst = first.instance();
    let a = first.dom();
    let joint = tensor_all(inst, factors)?.pre(&FinFun::diagonal(a, factors.len()))?;
    let order: Vec<usize> = partition.blocks().iter().flatten().copied().collect();
    let mut position = vec![0; order.len()];
    for (p, &c) in order.iter().enumerate() {
        position[c] = p;
    }
    let back = FinFun::projection(joint.cod(), &position)?;
    if back.cod() != cod {
        return Err(Error::TypeMismatch(format!("factors assemble to `{}`, expected `{cod}`", back.cod())));
    }
    joint.post(&back)
}

/// `(⊗ᵢ marginal(f, blockᵢ)) ∘ copy`, reindexed to the codomain of `f`.
pub fn product_of_marginals(f: &Kernel, partition: &Partition) -> Result<Kernel> {
    let margs = partition.blocks().iter().map(|b| marginal(f, b)).collect::<Result<Vec<_>>>()?;
    assemble(&margs, partition, f.cod())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CiMethod {
    Auto,
    Equivalence,
    Rank1,
    ExhaustiveSearch,
    N2Equation,
}

impl std::str::FromStr for CiMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => CiMethod::Auto,
            "equivalence" => CiMethod::Equivalence,
            "rank1" => CiMethod::Rank1,
            "exhaustive" | "exhaustive_search" => CiMethod::ExhaustiveSearch,
            "n2" | "n2_equation" => CiMethod::N2Equation,
            other => return Err(Error::Parse(format!("unknown CI method `{other}`"))),
        })
    }
}

/// Outcome of a conditional-independence query. When `holds`, the
/// factors (if any) reassemble to the kernel exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct CiResult {
    pub holds: bool,
    pub method: CiMethod,
    pub factors: Option<Vec<Kernel>>,
    pub witness: Option<Value>,
}

impl CiResult {
    pub fn to_json(&self) -> Value {
        let mut v = json!({ "holds": self.holds, "method": self.method });
        if let Some(fs) = &self.factors {
            v["certificate"] = Value::Array(fs.iter().map(Kernel::to_json).collect());
        }
        if let Some(w) = &self.witness {
            v["witness"] = w.clone();
        }
        v
    }
}

fn verified(f: &Kernel, partition: &Partition, method: CiMethod, factors: Vec<Kernel>) -> Result<CiResult> {
    if assemble(&factors, partition, f.cod())? != *f {
        return Err(Error::InvariantViolation(format!("{method:?} certificate does not reassemble")));
    }
    Ok(CiResult { holds: true, method, factors: Some(factors), witness: None })
}

fn refuted(method: CiMethod, witness: Value) -> CiResult {
    CiResult { holds: false, method, factors: None, witness: Some(witness) }
}

/// `f ≃ a·(product of marginals)`; the scalar goes on the last factor.
fn by_equivalence(f: &Kernel, partition: &Partition) -> Result<CiResult> {
    let pm = product_of_marginals(f, partition)?;
    match equivalent(&pm, f)? {
        Some(a) => {
            let mut factors = partition.blocks().iter().map(|b| marginal(f, b)).collect::<Result<Vec<_>>>()?;
            let last = factors.pop().expect("partition is non-empty");
            factors.push(scalar_action(&a, &last)?);
            verified(f, partition, CiMethod::Equivalence, factors)
        }
        None => Ok(refuted(
            CiMethod::Equivalence,
            json!({ "reason": "not a scalar multiple of the product of its marginals", "product_of_marginals": pm.to_json() }),
        )),
    }
}

/// Pivot-and-verify outer-product test per column. All factors but the
/// last are normalized; the last carries the mass.
fn by_rank1(f: &Kernel, partition: &Partition) -> Result<CiResult> {
    let inst = f.instance();
    let cod = f.cod();
    let atoms = cod.coords();
    let block_sets: Vec<FinSet> =
        partition.blocks().iter().map(|b| product(&b.iter().map(|&c| atoms[c].clone()).collect::<Vec<_>>())).collect();
    let n = partition.len();
    let mut factor_cols: Vec<Vec<TValue>> = vec![Vec::new(); n];
    for (a, col) in f.columns().iter().enumerate() {
        let w = col.weights().ok_or_else(|| Error::MethodInapplicable("rank1 needs weight payloads".into()))?;
        let Some(pivot) = w.iter().position(|r| !r.is_zero()) else {
            for (i, b) in block_sets.iter().enumerate() {
                let z = vec![Rat::zero(); b.len()];
                // Zero is CI with the zero factor last; earlier factors may be
                // any valid value, here the zero itself.
                factor_cols[i].push(inst.weights(b, z)?);
            }
            continue;
        };
        let pc = cod.split(pivot);
        let total: Rat = w.iter().sum();
        let mut vectors = Vec::with_capacity(n);
        for (bi, block) in partition.blocks().iter().enumerate() {
            let b = &block_sets[bi];
            let v: Vec<Rat> = (0..b.len())
                .map(|j| {
                    let mut c = pc.clone();
                    for (&coord, &val) in block.iter().zip(&b.split(j)) {
                        c[coord] = val;
                    }
                    w[cod.join(&c)].clone()
                })
                .collect();
            let s: Rat = v.iter().sum();
            vectors.push(v.iter().map(|x| x / &s).collect::<Vec<_>>());
        }
        vectors[n - 1] = vectors[n - 1].iter().map(|x| x * &total).collect();
        // Verify the outer product reproduces the column.
        let ok = (0..cod.len()).all(|i| {
            let c = cod.split(i);
            let prod = partition.blocks().iter().enumerate().fold(Rat::one(), |acc, (bi, block)| {
                let coords: Vec<usize> = block.iter().map(|&k| c[k]).collect();
                &acc * &vectors[bi][block_sets[bi].join(&coords)]
            });
            prod == w[i]
        });
        if !ok {
            return Ok(refuted(
                CiMethod::Rank1,
                json!({ "column": f.dom().label(a), "reason": "table is not an outer product" }),
            ));
        }
        for (i, v) in vectors.into_iter().enumerate() {
            factor_cols[i].push(inst.weights(&block_sets[i], v)?);
        }
    }
    let factors = factor_cols
        .into_iter()
        .zip(&block_sets)
        .map(|(cols, b)| Kernel::new(inst, f.dom(), b, cols))
        .collect::<Result<Vec<_>>>()?;
    verified(f, partition, CiMethod::Rank1, factors)
}

/// Searches every tuple of block values per column.
fn by_search(f: &Kernel, partition: &Partition) -> Result<CiResult> {
    let inst = f.instance();
    let atoms = f.cod().coords();
    let block_sets: Vec<FinSet> =
        partition.blocks().iter().map(|b| product(&b.iter().map(|&c| atoms[c].clone()).collect::<Vec<_>>())).collect();
    let values: Vec<Vec<TValue>> =
        block_sets.iter().map(|b| Ok(inst.enumerate(b)?.collect())).collect::<Result<_>>()?;
    let tuples: u128 = values.iter().map(|v| v.len() as u128).product();
    if tuples > crate::gscat::KERNEL_BUDGET {
        return Err(Error::BudgetExceeded {
            what: format!("factor tuples for `{}`", f.cod()),
            needed: tuples,
            budget: crate::gscat::KERNEL_BUDGET,
        });
    }
    let order: Vec<usize> = partition.blocks().iter().flatten().copied().collect();
    let mut position = vec![0; order.len()];
    for (p, &c) in order.iter().enumerate() {
        position[c] = p;
    }
    let back = FinFun::projection(&product(&block_sets), &position)?;

    let mut factor_cols: Vec<Vec<TValue>> = vec![Vec::new(); partition.len()];
    for (a, col) in f.columns().iter().enumerate() {
        let mut idx = vec![0usize; values.len()];
        let found = 'search: loop {
            let tuple: Vec<TValue> = idx.iter().zip(&values).map(|(&i, v)| v[i].clone()).collect();
            match inst.lax_c_n(&tuple).and_then(|j| inst.map(&back, &j)) {
                Ok(t) if &t == col => break 'search Some(tuple),
                Ok(_) | Err(Error::OutOfBound { .. }) => {}
                Err(e) => return Err(e),
            }
            let mut advanced = false;
            for (slot, v) in idx.iter_mut().zip(&values).rev() {
                *slot += 1;
                if *slot < v.len() {
                    advanced = true;
                    break;
                }
                *slot = 0;
            }
            if !advanced {
                break 'search None;
            }
        };
        match found {
            Some(tuple) => tuple.into_iter().enumerate().for_each(|(i, t)| factor_cols[i].push(t)),
            None => {
                return Ok(refuted(
                    CiMethod::ExhaustiveSearch,
                    json!({ "column": f.dom().label(a), "reason": "no factor tuple reproduces the column" }),
                ))
            }
        }
    }
    let factors = factor_cols
        .into_iter()
        .zip(&block_sets)
        .map(|(cols, b)| Kernel::new(inst, f.dom(), b, cols))
        .collect::<Result<Vec<_>>>()?;
    verified(f, partition, CiMethod::ExhaustiveSearch, factors)
}

fn is_weakly_markov(inst: &MonadInstance) -> Result<bool> {
    Ok(classify(inst)?.affinity.is_weakly_affine())
}

/// Decides whether `f` exhibits conditional independence of the blocks.
///
/// `Auto` picks the equivalence criterion on weakly Markov instances,
/// then rank-1 for weight payloads, then exhaustive search.
pub fn check_ci(f: &Kernel, partition: &Partition, method: CiMethod) -> Result<CiResult> {
    let inst = f.instance();
    let weights = f.instance().is_measure_like();
    match method {
        CiMethod::Auto => {
            if is_weakly_markov(inst)? {
                by_equivalence(f, partition)
            } else if weights {
                by_rank1(f, partition)
            } else if inst.is_enumerable() {
                by_search(f, partition)
            } else {
                Err(Error::MethodInapplicable(format!("no CI method applies to `{}`", inst.id())))
            }
        }
        CiMethod::Equivalence => {
            if !is_weakly_markov(inst)? {
                return Err(Error::MethodInapplicable(format!(
                    "equivalence needs a weakly Markov instance; `{}` is not",
                    inst.id()
                )));
            }
            by_equivalence(f, partition)
        }
        CiMethod::Rank1 => {
            if !weights {
                return Err(Error::MethodInapplicable(format!("rank1 needs weight payloads, not `{}`", inst.id())));
            }
            by_rank1(f, partition)
        }
        CiMethod::ExhaustiveSearch => {
            if !inst.is_enumerable() {
                return Err(Error::MethodInapplicable(format!("`{}` is not enumerable", inst.id())));
            }
            by_search(f, partition)
        }
        CiMethod::N2Equation => {
            let holds = check_ci_n2_equation(f, partition)?;
            Ok(CiResult {
                holds,
                method,
                factors: None,
                witness: (!holds).then(|| json!({ "reason": "f·mass(f) differs from the product of marginals" })),
            })
        }
    }
}

/// `f·m_f = f_X·f_Y` for a two-block partition.
pub fn check_ci_n2_equation(f: &Kernel, partition: &Partition) -> Result<bool> {
    if partition.len() != 2 {
        return Err(Error::TypeMismatch(format!("n=2 equation needs two blocks, got {}", partition.len())));
    }
    Ok(scalar_action(&mass(f), f)? == product_of_marginals(f, partition)?)
}

/// For three blocks `X|Y|Z`: if `(X⊗Y | Z)` and `(X | Y⊗Z)` are both
/// independent, so is `(X | Y | Z)`. Vacuous when a premise fails.
pub fn check_local_independence(f: &Kernel, partition: &Partition, method: CiMethod) -> Result<CheckReport> {
    if partition.len() != 3 {
        return Err(Error::TypeMismatch(format!("localised independence needs three blocks, got {}", partition.len())));
    }
    let b = partition.blocks();
    let arity = f.cod().arity();
    let xy_z = Partition::new(vec![[b[0].clone(), b[1].clone()].concat(), b[2].clone()], arity)?;
    let x_yz = Partition::new(vec![b[0].clone(), [b[1].clone(), b[2].clone()].concat()], arity)?;
    let p1 = check_ci(f, &xy_z, method)?;
    let p2 = check_ci(f, &x_yz, method)?;
    let mut report = CheckReport::new(
        format!("local-independence:{}", f.instance().id()),
        "CI(X⊗Y | Z) and CI(X | Y⊗Z) imply CI(X | Y | Z)",
        Mode::Exhaustive,
    );
    report.trials = 1;
    let mut details = json!({ "premise_xy_z": p1.holds, "premise_x_yz": p2.holds });
    if p1.holds && p2.holds {
        let c = check_ci(f, partition, method)?;
        details["conclusion"] = json!(c.holds);
        if !c.holds {
            report.fail_with(json!({ "kernel": f.to_json(), "conclusion": c.to_json() }));
        }
    } else {
        report.verdict = Verdict::Vacuous;
    }
    report.details = Some(details);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gscat::Effect;

    fn r(p: i64) -> Rat {
        Rat::from_integer(p)
    }

    fn xy() -> (FinSet, FinSet, FinSet) {
        let a = FinSet::numbered("A", "a", 1);
        let x = FinSet::numbered("X", "x", 2);
        let y = FinSet::numbered("Y", "y", 2);
        (a, x, y)
    }

    #[test]
    fn marginal_sums_rows() {
        let m = MonadInstance::measure();
        let (a, _, y) = xy();
        let cod = FinSet::numbered("X", "x", 1).times(&y);
        let f = Kernel::new(&m, &a, &cod, vec![m.weights(&cod, vec![r(1), r(2)]).unwrap()]).unwrap();
        assert_eq!(marginal(&f, &[0]).unwrap().column(0).weights().unwrap(), &[r(3)]);
        assert_eq!(marginal(&f, &[0, 1]).unwrap(), f);
    }

    #[test]
    fn zero_kernel_is_ci() {
        let m = MonadInstance::measure();
        let (a, x, y) = xy();
        let cod = x.times(&y);
        let z = Kernel::zero(&m, &a, &cod).unwrap();
        let p = Partition::singletons(2);
        assert!(marginal(&z, &[0]).unwrap().column(0).is_zero());
        assert!(check_ci(&z, &p, CiMethod::Auto).unwrap().holds);
    }

    #[test]
    fn diagonal_fails_rank1() {
        let m = MonadInstance::measure();
        let (a, x, y) = xy();
        let cod = x.times(&y);
        let f = Kernel::new(&m, &a, &cod, vec![m.weights(&cod, vec![r(1), r(0), r(0), r(1)]).unwrap()]).unwrap();
        let res = check_ci(&f, &Partition::singletons(2), CiMethod::Rank1).unwrap();
        assert!(!res.holds);
        let pm = product_of_marginals(&f, &Partition::singletons(2)).unwrap();
        assert_eq!(pm.column(0).weights().unwrap(), &[r(1), r(1), r(1), r(1)]);
    }

    #[test]
    fn scaled_product_holds_with_certificate() {
        let ms = MonadInstance::nonzero_measure();
        let (a, x, y) = xy();
        let cod = x.times(&y);
        let g1 = Kernel::new(&ms, &a, &x, vec![ms.weights(&x, vec![Rat::new(1, 3), Rat::new(2, 3)]).unwrap()]).unwrap();
        let g2 = Kernel::new(&ms, &a, &y, vec![ms.weights(&y, vec![Rat::new(1, 4), Rat::new(3, 4)]).unwrap()]).unwrap();
        let p = Partition::singletons(2);
        let prod = assemble(&[g1, g2], &p, &cod).unwrap();
        let s = Effect::constant(&ms, &a, &ms.weights(&FinSet::unit(), vec![r(5)]).unwrap()).unwrap();
        let f = scalar_action(&s, &prod).unwrap();
        let res = check_ci(&f, &p, CiMethod::Equivalence).unwrap();
        assert!(res.holds);
        assert_eq!(assemble(res.factors.as_ref().unwrap(), &p, &cod).unwrap(), f);
        assert!(check_ci_n2_equation(&f, &p).unwrap());
        assert!(check_ci(&f, &p, CiMethod::Rank1).unwrap().holds);
    }

    #[test]
    fn partition_parsing() {
        let x = FinSet::numbered("X", "x", 2);
        let y = FinSet::numbered("Y", "y", 2);
        let z = FinSet::numbered("Z", "z", 2);
        let cod = product(&[x, y, z]);
        let p = Partition::parse("X,Y|Z", &cod).unwrap();
        assert_eq!(p.blocks(), &[vec![0, 1], vec![2]]);
        assert_eq!(p.to_expr(&cod), "X,Y|Z");
        assert_eq!(Partition::parse("0|1,2", &cod).unwrap().blocks(), &[vec![0], vec![1, 2]]);
        assert!(Partition::parse("X|Y", &cod).is_err());
        assert!(Partition::parse("X|X,Y,Z", &cod).is_err());
        assert!(Partition::parse("W|X,Y,Z", &cod).is_err());
    }

    #[test]
    fn singleton_factor_n2_trivial() {
        let ms = MonadInstance::nonzero_measure();
        let a = FinSet::numbered("A", "a", 2);
        let x = FinSet::numbered("X", "x", 1);
        let y = FinSet::numbered("Y", "y", 3);
        let cod = x.times(&y);
        for t in 0..20 {
            let f = Kernel::sample(&ms, &a, &cod, &mut crate::trial_rng(2, t)).unwrap();
            assert!(check_ci_n2_equation(&f, &Partition::singletons(2)).unwrap());
        }
    }
}
