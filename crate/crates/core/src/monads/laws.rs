//! Monad and commutativity laws, checked on concrete elements.

use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::finset::{enumerate_functions, FinFun, FinSet};
use crate::report::{CheckReport, Mode};
use crate::rng::trial_rng;

use super::instance::MonadInstance;
use super::value::TValue;

/// Upper bound on the cases one law may examine in exhaustive mode.
pub const EXHAUSTIVE_BUDGET: u128 = 1_000_000;

/// What a law quantifies over; indices refer to the sets `X, Y, Z`.
#[derive(Clone, Copy, Debug)]
enum Slot {
    Elem(usize),
    Value(usize),
    Fun(usize, usize),
    Kernel(usize, usize),
}

#[derive(Clone, Debug)]
enum Arg {
    Elem(usize),
    Value(TValue),
    Fun(FinFun),
    Kernel(Vec<TValue>),
}

impl Arg {
    fn elem(&self) -> usize {
        match self {
            Arg::Elem(i) => *i,
            _ => unreachable!("slot kind"),
        }
    }

    fn value(&self) -> &TValue {
        match self {
            Arg::Value(t) => t,
            _ => unreachable!("slot kind"),
        }
    }

    fn fun(&self) -> &FinFun {
        match self {
            Arg::Fun(f) => f,
            _ => unreachable!("slot kind"),
        }
    }

    fn kernel(&self) -> &[TValue] {
        match self {
            Arg::Kernel(k) => k,
            _ => unreachable!("slot kind"),
        }
    }

    fn to_json(&self, inst: &MonadInstance) -> Value {
        match self {
            Arg::Elem(i) => json!({ "element": *i }),
            Arg::Value(t) => inst.value_json(t),
            Arg::Fun(f) => json!({ "function": f.table() }),
            Arg::Kernel(k) => Value::Array(k.iter().map(|c| inst.payload_json(c)).collect()),
        }
    }
}

/// Two sides of an equation; `None` when they agree.
type Outcome = Option<(TValue, TValue)>;

struct Law {
    name: &'static str,
    statement: &'static str,
    slots: &'static [Slot],
    eval: fn(&MonadInstance, &[FinSet], &[Arg]) -> Result<Outcome>,
}

fn differ(lhs: TValue, rhs: TValue) -> Outcome {
    (lhs != rhs).then_some((lhs, rhs))
}

fn kleisli_after(inst: &MonadInstance, cod: &FinSet, l: &[TValue], k: &[TValue]) -> Result<Vec<TValue>> {
    k.iter().map(|c| inst.extend(cod, l, c)).collect()
}

fn eta_kernel(inst: &MonadInstance, f: &FinFun) -> Vec<TValue> {
    (0..f.dom().len()).map(|i| inst.unit(f.cod(), f.apply(i)).expect("in range")).collect()
}

const LAWS: &[Law] = &[
    Law {
        name: "kleisli-left-unit",
        statement: "extend(k)(η(x)) = k(x)",
        slots: &[Slot::Elem(0), Slot::Kernel(0, 1)],
        eval: |inst, s, a| {
            let x = a[0].elem();
            let k = a[1].kernel();
            Ok(differ(inst.extend(&s[1], k, &inst.unit(&s[0], x)?)?, k[x].clone()))
        },
    },
    Law {
        name: "kleisli-right-unit",
        statement: "extend(η)(t) = t",
        slots: &[Slot::Value(0)],
        eval: |inst, s, a| {
            let t = a[0].value();
            let eta = eta_kernel(inst, &FinFun::identity(&s[0]));
            Ok(differ(inst.extend(&s[0], &eta, t)?, t.clone()))
        },
    },
    Law {
        name: "kleisli-associativity",
        statement: "extend(l)(extend(k)(t)) = extend(extend(l)∘k)(t)",
        slots: &[Slot::Value(0), Slot::Kernel(0, 1), Slot::Kernel(1, 2)],
        eval: |inst, s, a| {
            let (t, k, l) = (a[0].value(), a[1].kernel(), a[2].kernel());
            let lhs = inst.extend(&s[2], l, &inst.extend(&s[1], k, t)?)?;
            let lk = kleisli_after(inst, &s[2], l, k)?;
            Ok(differ(lhs, inst.extend(&s[2], &lk, t)?))
        },
    },
    Law {
        name: "functor-composition",
        statement: "T(g∘f) = T(g)∘T(f) and T(id) = id",
        slots: &[Slot::Value(0), Slot::Fun(0, 1), Slot::Fun(1, 2)],
        eval: |inst, s, a| {
            let (t, f, g) = (a[0].value(), a[1].fun(), a[2].fun());
            let id = inst.map(&FinFun::identity(&s[0]), t)?;
            if &id != t {
                return Ok(differ(id, t.clone()));
            }
            let lhs = inst.map(&g.after(f)?, t)?;
            Ok(differ(lhs, inst.map(g, &inst.map(f, t)?)?))
        },
    },
    Law {
        name: "map-is-extend",
        statement: "T(f) = extend(η∘f)",
        slots: &[Slot::Value(0), Slot::Fun(0, 1)],
        eval: |inst, s, a| {
            let (t, f) = (a[0].value(), a[1].fun());
            Ok(differ(inst.map(f, t)?, inst.extend(&s[1], &eta_kernel(inst, f), t)?))
        },
    },
    Law {
        name: "unit-naturality",
        statement: "T(f)(η(x)) = η(f(x))",
        slots: &[Slot::Elem(0), Slot::Fun(0, 1)],
        eval: |inst, s, a| {
            let (x, f) = (a[0].elem(), a[1].fun());
            Ok(differ(inst.map(f, &inst.unit(&s[0], x)?)?, inst.unit(&s[1], f.apply(x))?))
        },
    },
    Law {
        name: "c-naturality",
        statement: "c(T(f)t, T(g)u) = T(f×g)(c(t,u))",
        slots: &[Slot::Value(0), Slot::Value(1), Slot::Fun(0, 2), Slot::Fun(1, 0)],
        eval: |inst, _, a| {
            let (t, u, f, g) = (a[0].value(), a[1].value(), a[2].fun(), a[3].fun());
            let lhs = inst.lax_c(&inst.map(f, t)?, &inst.map(g, u)?)?;
            Ok(differ(lhs, inst.map(&f.times(g), &inst.lax_c(t, u)?)?))
        },
    },
    Law {
        name: "c-symmetry",
        statement: "T(swap)(c(t,u)) = c(u,t)",
        slots: &[Slot::Value(0), Slot::Value(1)],
        eval: |inst, s, a| {
            let (t, u) = (a[0].value(), a[1].value());
            let lhs = inst.map(&FinFun::swap(&s[0], &s[1]), &inst.lax_c(t, u)?)?;
            Ok(differ(lhs, inst.lax_c(u, t)?))
        },
    },
    Law {
        name: "c-associativity",
        statement: "c(c(t,u),v) = c(t,c(u,v)) on X×Y×Z",
        slots: &[Slot::Value(0), Slot::Value(1), Slot::Value(2)],
        eval: |inst, _, a| {
            let (t, u, v) = (a[0].value(), a[1].value(), a[2].value());
            let lhs = inst.lax_c(&inst.lax_c(t, u)?, v)?;
            Ok(differ(lhs, inst.lax_c(t, &inst.lax_c(u, v)?)?))
        },
    },
    Law {
        name: "c-unit",
        statement: "c(η(x), η(y)) = η(x,y)",
        slots: &[Slot::Elem(0), Slot::Elem(1)],
        eval: |inst, s, a| {
            let (x, y) = (a[0].elem(), a[1].elem());
            let lhs = inst.lax_c(&inst.unit(&s[0], x)?, &inst.unit(&s[1], y)?)?;
            Ok(differ(lhs, inst.unit(&s[0].times(&s[1]), x * s[1].len() + y)?))
        },
    },
    Law {
        name: "c-unitor",
        statement: "T(X×I ≅ X)(c(t, η(*))) = t",
        slots: &[Slot::Value(0)],
        eval: |inst, s, a| {
            let t = a[0].value();
            let xi = s[0].times(&FinSet::unit());
            let back = FinFun::projection(&xi, &[0])?;
            let lhs = inst.map(&back, &inst.lax_c(t, &inst.scalar_one())?)?;
            Ok(differ(lhs, t.clone()))
        },
    },
    Law {
        name: "c-monoidal",
        statement: "extend(k⊗l)(c(t,u)) = c(extend(k)t, extend(l)u)",
        slots: &[Slot::Value(0), Slot::Value(1), Slot::Kernel(0, 2), Slot::Kernel(1, 0)],
        eval: |inst, s, a| {
            let (t, u, k, l) = (a[0].value(), a[1].value(), a[2].kernel(), a[3].kernel());
            let mut kl = Vec::with_capacity(k.len() * l.len());
            for kc in k {
                for lc in l {
                    kl.push(inst.lax_c(kc, lc)?);
                }
            }
            let cod = s[2].times(&s[0]);
            let lhs = inst.extend(&cod, &kl, &inst.lax_c(t, u)?)?;
            let rhs = inst.lax_c(&inst.extend(&s[2], k, t)?, &inst.extend(&s[0], l, u)?)?;
            Ok(differ(lhs, rhs))
        },
    },
];

fn slot_size(inst: &MonadInstance, sets: &[FinSet], slot: Slot) -> Option<u128> {
    let pow = |b: u128, e: usize| b.checked_pow(e as u32);
    match slot {
        Slot::Elem(i) => Some(sets[i].len() as u128),
        Slot::Value(i) => inst.count(&sets[i]),
        Slot::Fun(i, j) => pow(sets[j].len() as u128, sets[i].len()),
        Slot::Kernel(i, j) => pow(inst.count(&sets[j])?, sets[i].len()),
    }
}

fn slot_domain(inst: &MonadInstance, sets: &[FinSet], slot: Slot) -> Result<Vec<Arg>> {
    Ok(match slot {
        Slot::Elem(i) => (0..sets[i].len()).map(Arg::Elem).collect(),
        Slot::Value(i) => inst.enumerate(&sets[i])?.map(Arg::Value).collect(),
        Slot::Fun(i, j) => enumerate_functions(&sets[i], &sets[j])?.map(Arg::Fun).collect(),
        Slot::Kernel(i, j) => {
            let values: Vec<TValue> = inst.enumerate(&sets[j])?.collect();
            let n = sets[i].len();
            let mut out = Vec::new();
            let mut idx = vec![0usize; n];
            'outer: loop {
                out.push(Arg::Kernel(idx.iter().map(|&v| values[v].clone()).collect()));
                for slot in idx.iter_mut().rev() {
                    *slot += 1;
                    if *slot < values.len() {
                        continue 'outer;
                    }
                    *slot = 0;
                }
                break;
            }
            out
        }
    })
}

fn sample_slot(inst: &MonadInstance, sets: &[FinSet], slot: Slot, rng: &mut impl Rng) -> Result<Arg> {
    Ok(match slot {
        Slot::Elem(i) => Arg::Elem(rng.random_range(0..sets[i].len())),
        Slot::Value(i) => Arg::Value(inst.sample(&sets[i], rng)?),
        Slot::Fun(i, j) => {
            let m = sets[j].len();
            let map = (0..sets[i].len()).map(|_| rng.random_range(0..m)).collect();
            Arg::Fun(FinFun::new(sets[i].clone(), sets[j].clone(), map)?)
        }
        Slot::Kernel(i, j) => {
            Arg::Kernel((0..sets[i].len()).map(|_| inst.sample(&sets[j], rng)).collect::<Result<_>>()?)
        }
    })
}

/// The sets `X, Y, Z` for every size triple drawn from `sizes`.
fn size_triples(sizes: &[usize]) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for &a in sizes {
        for &b in sizes {
            for &c in sizes {
                out.push([a, b, c]);
            }
        }
    }
    out
}

fn sets_for(triple: [usize; 3]) -> Vec<FinSet> {
    vec![
        FinSet::numbered("X", "x", triple[0]),
        FinSet::numbered("Y", "y", triple[1]),
        FinSet::numbered("Z", "z", triple[2]),
    ]
}

/// Cases an exhaustive run over `sizes` would examine, or `None` if unbounded.
pub fn exhaustive_cost(inst: &MonadInstance, sizes: &[usize]) -> Option<u128> {
    let mut total: u128 = 0;
    for triple in size_triples(sizes) {
        let sets = sets_for(triple);
        for law in LAWS {
            let mut n: u128 = 1;
            for &slot in law.slots {
                n = n.checked_mul(slot_size(inst, &sets, slot)?)?;
            }
            total = total.checked_add(n)?;
        }
    }
    Some(total)
}

struct Tally {
    cases: u64,
    skipped: u64,
    per_law: Vec<(u64, u64)>,
    witness: Option<Value>,
}

fn run_case(inst: &MonadInstance, sets: &[FinSet], law_index: usize, args: &[Arg], tally: &mut Tally) -> Result<()> {
    let law = &LAWS[law_index];
    tally.cases += 1;
    tally.per_law[law_index].0 += 1;
    let outcome = match (law.eval)(inst, sets, args) {
        Ok(o) => o,
        Err(Error::OutOfBound { .. }) => {
            tally.skipped += 1;
            tally.per_law[law_index].1 += 1;
            return Ok(());
        }
        Err(Error::PayloadInvalid { reason, .. }) if tally.witness.is_none() => {
            tally.witness = Some(json!({
                "law": law.name,
                "sizes": sets.iter().map(FinSet::len).collect::<Vec<_>>(),
                "inputs": args.iter().map(|a| a.to_json(inst)).collect::<Vec<_>>(),
                "error": reason,
            }));
            return Ok(());
        }
        Err(e) => return Err(e),
    };
    if let (Some((lhs, rhs)), None) = (outcome, &tally.witness) {
        tally.witness = Some(json!({
            "law": law.name,
            "statement": law.statement,
            "sizes": sets.iter().map(FinSet::len).collect::<Vec<_>>(),
            "inputs": args.iter().map(|a| a.to_json(inst)).collect::<Vec<_>>(),
            "lhs": inst.value_json(&lhs),
            "rhs": inst.value_json(&rhs),
        }));
    }
    Ok(())
}

/// Checks the Kleisli, functor, naturality and commutativity laws of `inst`
/// on every size triple drawn from `sizes`.
///
/// Exhaustive mode enumerates every input and fails with `BudgetExceeded`
/// past [`EXHAUSTIVE_BUDGET`] cases per law; randomized mode draws `trials`
/// inputs per law and triple. Cases whose intermediate values leave the
/// multiplicity bound of `F` are skipped and counted in a note.
pub fn check_monad_laws(
    inst: &MonadInstance,
    sizes: &[usize],
    mode: Mode,
    trials: u64,
    seed: u64,
) -> Result<CheckReport> {
    if sizes.is_empty() || sizes.contains(&0) {
        return Err(Error::InvalidSet("law sizes must be non-empty and positive".into()));
    }
    let mut report = CheckReport::new(
        format!("monad-laws:{}", inst.id()),
        "Kleisli unit and associativity, functoriality, naturality of η and c, symmetry and associativity of c",
        mode,
    );
    let mut tally = Tally { cases: 0, skipped: 0, per_law: vec![(0, 0); LAWS.len()], witness: None };
    let mut stream = 0u64;
    for triple in size_triples(sizes) {
        let sets = sets_for(triple);
        for (li, law) in LAWS.iter().enumerate() {
            match mode {
                Mode::Exhaustive => {
                    if !inst.is_enumerable() {
                        return Err(Error::NotEnumerable(inst.id()));
                    }
                    let mut needed: u128 = 1;
                    for &slot in law.slots {
                        needed = needed.saturating_mul(slot_size(inst, &sets, slot).unwrap_or(u128::MAX));
                    }
                    if needed > EXHAUSTIVE_BUDGET {
                        return Err(Error::BudgetExceeded {
                            what: format!("law `{}` at sizes {:?}", law.name, triple),
                            needed,
                            budget: EXHAUSTIVE_BUDGET,
                        });
                    }
                    let domains: Vec<Vec<Arg>> =
                        law.slots.iter().map(|&s| slot_domain(inst, &sets, s)).collect::<Result<_>>()?;
                    let mut idx = vec![0usize; domains.len()];
                    'cases: loop {
                        let args: Vec<Arg> = idx.iter().zip(&domains).map(|(&i, d)| d[i].clone()).collect();
                        run_case(inst, &sets, li, &args, &mut tally)?;
                        for (slot, d) in idx.iter_mut().zip(&domains).rev() {
                            *slot += 1;
                            if *slot < d.len() {
                                continue 'cases;
                            }
                            *slot = 0;
                        }
                        break;
                    }
                }
                Mode::Randomized | Mode::SolverAsserted => {
                    for _ in 0..trials {
                        let mut rng = trial_rng(seed, stream);
                        stream += 1;
                        let args: Vec<Arg> =
                            law.slots.iter().map(|&s| sample_slot(inst, &sets, s, &mut rng)).collect::<Result<_>>()?;
                        run_case(inst, &sets, li, &args, &mut tally)?;
                    }
                }
            }
        }
    }
    report.trials = tally.cases;
    if mode != Mode::Exhaustive {
        report.seed = Some(seed);
    }
    report.details = Some(Value::Object(
        LAWS.iter()
            .zip(&tally.per_law)
            .map(|(l, &(n, skipped))| (l.name.to_string(), json!({ "cases": n, "skipped": skipped })))
            .collect(),
    ));
    if tally.skipped > 0 {
        report.notes.push(format!("{} cases skipped: multiplicity bound exceeded", tally.skipped));
    }
    if let Some(w) = tally.witness {
        report.fail_with(w);
    }
    report.label_randomized();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::FiniteMonoid;

    #[test]
    fn writer_z3_exhaustive() {
        let inst = MonadInstance::parse("writer:Z3").unwrap();
        let r = check_monad_laws(&inst, &[1, 2], Mode::Exhaustive, 0, 0).unwrap();
        assert!(r.passed(), "{:?}", r.witness);
        assert!(r.trials > 0);
    }

    #[test]
    fn measure_randomized() {
        let r = check_monad_laws(&MonadInstance::measure(), &[1, 2], Mode::Randomized, 500, 7).unwrap();
        assert!(r.passed(), "{:?}", r.witness);
        assert_eq!(r.seed, Some(7));
        assert!(r.notes.iter().any(|n| n.contains("no counterexample found")));
    }

    #[test]
    fn broken_writer_unit_fails() {
        // Z2 with the non-identity element declared as unit.
        let m = FiniteMonoid::new_unchecked("Z2-bad", vec!["0".into(), "1".into()], 1, vec![vec![0, 1], vec![1, 0]]);
        let r = check_monad_laws(&MonadInstance::writer(m), &[1], Mode::Exhaustive, 0, 0).unwrap();
        assert!(!r.passed());
        assert!(r.witness.is_some());
    }

    #[test]
    fn every_bundled_instance_passes_small() {
        for inst in MonadInstance::all_bundled() {
            let mode = match exhaustive_cost(&inst, &[1, 2]) {
                Some(n) if n <= 200_000 => Mode::Exhaustive,
                _ => Mode::Randomized,
            };
            let r = check_monad_laws(&inst, &[1, 2], mode, 40, 1).unwrap();
            assert!(r.passed(), "{}: {:?}", inst.id(), r.witness);
        }
    }

    #[test]
    fn exhaustive_rejects_measures() {
        assert!(matches!(
            check_monad_laws(&MonadInstance::measure(), &[1], Mode::Exhaustive, 0, 0),
            Err(Error::NotEnumerable(_))
        ));
    }
}
