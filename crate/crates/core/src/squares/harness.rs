//! Three independent views of weak affinity, checked side by side:
//! the monoid `T1` is a group, every effect has an inverse, and the
//! associativity squares are pullbacks.

use std::collections::BTreeSet;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::finset::FinSet;
use crate::gscat::{try_effect_inverse, Effect, Kernel};
use crate::monads::{classify, MonadInstance};
use crate::report::{CheckReport, Mode, Verdict};
use crate::rng::trial_rng;

use super::{check_pullback, AssocSquare};

fn effects_invertible(
    inst: &MonadInstance,
    sizes: &BTreeSet<usize>,
    mode: Mode,
    trials: u64,
    seed: u64,
) -> Result<(bool, u64, Option<Value>)> {
    let one = FinSet::unit();
    let mut examined = 0;
    for &n in sizes {
        let x = FinSet::numbered(&format!("X{n}"), "x", n);
        let effects: Vec<Kernel> = match mode {
            Mode::Exhaustive => Kernel::enumerate_all(inst, &x, &one)?,
            Mode::Randomized | Mode::SolverAsserted => {
                let mut ks: Vec<Kernel> = Kernel::zero(inst, &x, &one).into_iter().collect();
                for t in 0..trials {
                    ks.push(Kernel::sample(inst, &x, &one, &mut trial_rng(seed, t))?);
                }
                ks
            }
        };
        for k in effects {
            examined += 1;
            let e = Effect::new(k)?;
            if let Err(no) = try_effect_inverse(&e)? {
                return Ok((false, examined, Some(json!({ "effect": e.to_json(), "no_inverse_at": no.to_json() }))));
            }
        }
    }
    Ok((true, examined, None))
}

/// Runs the three conditions on `inst`. Passes when they agree; the
/// details record each outcome with its witness.
pub fn theorem_harness(
    inst: &MonadInstance,
    triples: &[[usize; 3]],
    mode: Mode,
    trials: u64,
    seed: u64,
) -> Result<CheckReport> {
    if mode == Mode::Exhaustive && !inst.is_enumerable() {
        return Err(Error::NotEnumerable(inst.id()));
    }
    let mut report = CheckReport::new(
        format!("theorem:{}", inst.id()),
        "T1 is a group iff every effect is invertible iff the associativity squares are pullbacks",
        mode,
    );
    if mode != Mode::Exhaustive {
        report.seed = Some(seed);
    }

    let class = classify(inst)?;
    let group = class.affinity.is_weakly_affine();

    let sizes: BTreeSet<usize> = triples.iter().flatten().copied().collect();
    let (inverses, effects_examined, effect_witness) = effects_invertible(inst, &sizes, mode, trials, seed)?;

    let mut squares = Vec::new();
    let mut pullbacks = true;
    let mut examined = class.examined + effects_examined;
    for t in triples {
        let r = check_pullback(&AssocSquare::with_sizes(inst, *t), mode, trials, seed)?;
        examined += r.trials;
        pullbacks &= r.verdict != Verdict::Fail;
        squares.push(json!({
            "sizes": t,
            "verdict": r.verdict,
            "mode": r.mode,
            "cones": r.trials,
            "witness": r.witness,
            "notes": r.notes,
        }));
    }

    report.trials = examined;
    report.details = Some(json!({
        "group": { "holds": group, "class": class.affinity, "witness": class.witness },
        "effects_invertible": { "holds": inverses, "examined": effects_examined, "witness": effect_witness },
        "assoc_pullbacks": { "holds": pullbacks, "squares": squares },
    }));
    report.notes.extend(class.notes.iter().cloned());
    if !(group == inverses && inverses == pullbacks) {
        report.fail_with(json!({
            "group": group,
            "effects_invertible": inverses,
            "assoc_pullbacks": pullbacks,
        }));
    }
    report.label_randomized();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcomes(r: &CheckReport) -> [bool; 3] {
        let d = r.details.as_ref().unwrap();
        [
            d["group"]["holds"].as_bool().unwrap(),
            d["effects_invertible"]["holds"].as_bool().unwrap(),
            d["assoc_pullbacks"]["holds"].as_bool().unwrap(),
        ]
    }

    #[test]
    fn agreement_on_small_instances() {
        let z2 = MonadInstance::parse("writer:Z2").unwrap();
        let r = theorem_harness(&z2, &[[1, 1, 1], [2, 1, 1]], Mode::Exhaustive, 0, 0).unwrap();
        assert!(r.passed(), "{:?}", r.witness);
        assert_eq!(outcomes(&r), [true; 3]);

        let p = MonadInstance::powerset();
        let r = theorem_harness(&p, &[[1, 1, 1]], Mode::Exhaustive, 0, 0).unwrap();
        assert!(r.passed(), "{:?}", r.witness);
        assert_eq!(outcomes(&r), [false; 3]);
    }

    #[test]
    fn measures_fail_all_three() {
        let r = theorem_harness(&MonadInstance::measure(), &[[1, 1, 1]], Mode::Randomized, 50, 3).unwrap();
        assert!(r.passed(), "{:?}", r.witness);
        assert_eq!(outcomes(&r), [false; 3]);
    }

    #[test]
    fn exhaustive_needs_enumeration() {
        assert!(theorem_harness(&MonadInstance::distribution(), &[[1, 1, 1]], Mode::Exhaustive, 0, 0).is_err());
    }
}
