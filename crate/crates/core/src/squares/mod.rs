//! Pullback checks for commutative squares
//!
//! ```text
//!   apex ──top──▶ right
//!    │              │
//!   left          right
//!    ▼              ▼
//!   down ─bottom─▶ target
//! ```
//!
//! A cone is a pair `(r, d)` with `right(r) = bottom(d)`; the square is a
//! pullback when each cone has exactly one apex element mapping onto it.

mod assoc;
mod harness;
mod strength;

use std::collections::HashMap;
use std::hash::Hash;

use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::report::{CheckReport, Mode, Verdict};
use crate::rng::trial_rng;

pub use assoc::AssocSquare;
pub use harness::theorem_harness;
pub use strength::{PositivitySquare, StrongAffineSquare};

/// What a cone solver found.
#[derive(Clone, Debug, PartialEq)]
pub enum Mediation<A> {
    Unique(A),
    Missing { reason: String },
    Multiple(A, A),
}

pub trait Square {
    type Apex: Clone + Eq + Hash;
    type Right: Clone + Eq + Hash;
    type Down: Clone + Eq + Hash;
    type Target: Clone + Eq + Hash;

    fn name(&self) -> String;
    /// What the square being a pullback means, in words.
    fn property(&self) -> String;

    fn top(&self, a: &Self::Apex) -> Result<Self::Right>;
    fn left(&self, a: &Self::Apex) -> Result<Self::Down>;
    fn right(&self, r: &Self::Right) -> Result<Self::Target>;
    fn bottom(&self, d: &Self::Down) -> Result<Self::Target>;

    /// Every apex element, when the corner is enumerable.
    fn apexes(&self) -> Result<Option<Vec<Self::Apex>>>;
    fn rights(&self) -> Result<Option<Vec<Self::Right>>>;
    fn downs(&self) -> Result<Option<Vec<Self::Down>>>;

    /// Apex elements always examined first in randomized mode.
    fn probe_apexes(&self) -> Vec<Self::Apex> {
        Vec::new()
    }
    fn sample_apex(&self, rng: &mut ChaCha8Rng) -> Result<Self::Apex>;

    /// Cones always examined first in randomized mode.
    fn probe_cones(&self) -> Vec<(Self::Right, Self::Down)> {
        Vec::new()
    }
    fn sample_cone(&self, rng: &mut ChaCha8Rng) -> Result<(Self::Right, Self::Down)>;

    /// The mediating apex element of a cone; `None` without a solver.
    fn mediate(&self, r: &Self::Right, d: &Self::Down) -> Option<Result<Mediation<Self::Apex>>>;

    fn apex_json(&self, a: &Self::Apex) -> Value;
    fn right_json(&self, r: &Self::Right) -> Value;
    fn down_json(&self, d: &Self::Down) -> Value;
    fn target_json(&self, t: &Self::Target) -> Value;
}

fn skip_bound<T>(r: Result<T>, skipped: &mut u64) -> Result<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::OutOfBound { .. }) => {
            *skipped += 1;
            Ok(None)
        }
        Err(e) => Err(e),
    }
}

fn commutes_at<S: Square>(sq: &S, a: &S::Apex, skipped: &mut u64) -> Result<Option<Value>> {
    let lhs = match skip_bound(sq.top(a).and_then(|r| sq.right(&r)), skipped)? {
        Some(v) => v,
        None => return Ok(None),
    };
    let rhs = match skip_bound(sq.left(a).and_then(|d| sq.bottom(&d)), skipped)? {
        Some(v) => v,
        None => return Ok(None),
    };
    Ok((lhs != rhs).then(|| {
        json!({
            "apex": sq.apex_json(a),
            "via_right": sq.target_json(&lhs),
            "via_down": sq.target_json(&rhs),
        })
    }))
}

/// Compares the two composites on every apex element (exhaustive) or on the
/// probes plus `trials` sampled ones.
pub fn check_commutes<S: Square>(sq: &S, mode: Mode, trials: u64, seed: u64) -> Result<CheckReport> {
    let mut report = CheckReport::new(format!("commutes:{}", sq.name()), "the square commutes", mode);
    let mut skipped = 0;
    let mut examined = 0;
    let mut witness = None;
    let mut visit = |a: &S::Apex, examined: &mut u64, skipped: &mut u64| -> Result<bool> {
        *examined += 1;
        if let Some(w) = commutes_at(sq, a, skipped)? {
            witness = Some(w);
            return Ok(false);
        }
        Ok(true)
    };
    match mode {
        Mode::Exhaustive => {
            let all = sq.apexes()?.ok_or_else(|| Error::NotEnumerable(sq.name()))?;
            for a in &all {
                if !visit(a, &mut examined, &mut skipped)? {
                    break;
                }
            }
        }
        Mode::Randomized | Mode::SolverAsserted => {
            report.seed = Some(seed);
            let mut go = true;
            for a in sq.probe_apexes() {
                if !visit(&a, &mut examined, &mut skipped)? {
                    go = false;
                    break;
                }
            }
            for t in 0..trials {
                if !go {
                    break;
                }
                let a = sq.sample_apex(&mut trial_rng(seed, t))?;
                go = visit(&a, &mut examined, &mut skipped)?;
            }
        }
    }
    report.trials = examined;
    if skipped > 0 {
        report.notes.push(format!("{skipped} cases skipped: multiplicity bound exceeded"));
    }
    if let Some(w) = witness {
        report.fail_with(w);
    }
    report.label_randomized();
    Ok(report)
}

fn cone_json<S: Square>(sq: &S, r: &S::Right, d: &S::Down) -> Value {
    json!({ "right": sq.right_json(r), "down": sq.down_json(d) })
}

/// Checks the universal property, after checking commutation.
///
/// Exhaustive mode counts the mediators of every cone from the apex
/// images. Randomized mode runs the solver on the probe cones and on
/// `trials` sampled cones, verifying every mediator it returns.
pub fn check_pullback<S: Square>(sq: &S, mode: Mode, trials: u64, seed: u64) -> Result<CheckReport> {
    let mut report = CheckReport::new(format!("pullback:{}", sq.name()), sq.property(), mode);
    if mode != Mode::Exhaustive {
        report.seed = Some(seed);
    }
    let commutes = check_commutes(sq, mode, trials, seed)?;
    if commutes.verdict == Verdict::Fail {
        report.trials = commutes.trials;
        report.notes.push("square does not commute; pullback not evaluated".into());
        report.fail_with(json!({ "commutes": false, "apex": commutes.witness }));
        return Ok(report);
    }
    let mut skipped = 0u64;
    let mut examined = 0u64;
    match mode {
        Mode::Exhaustive => {
            let apexes = sq.apexes()?.ok_or_else(|| Error::NotEnumerable(sq.name()))?;
            let rights = sq.rights()?.ok_or_else(|| Error::NotEnumerable(sq.name()))?;
            let downs = sq.downs()?.ok_or_else(|| Error::NotEnumerable(sq.name()))?;
            let mut mediators: HashMap<(S::Right, S::Down), Vec<usize>> = HashMap::new();
            for (i, a) in apexes.iter().enumerate() {
                let (Some(r), Some(d)) = (skip_bound(sq.top(a), &mut skipped)?, skip_bound(sq.left(a), &mut skipped)?)
                else {
                    continue;
                };
                mediators.entry((r, d)).or_default().push(i);
            }
            let mut downs_by_target: HashMap<S::Target, Vec<usize>> = HashMap::new();
            for (j, d) in downs.iter().enumerate() {
                if let Some(t) = skip_bound(sq.bottom(d), &mut skipped)? {
                    downs_by_target.entry(t).or_default().push(j);
                }
            }
            'cones: for r in &rights {
                let Some(t) = skip_bound(sq.right(r), &mut skipped)? else {
                    continue;
                };
                for &j in downs_by_target.get(&t).map(Vec::as_slice).unwrap_or(&[]) {
                    examined += 1;
                    let d = &downs[j];
                    let found = mediators.get(&(r.clone(), d.clone())).map(Vec::as_slice).unwrap_or(&[]);
                    if found.len() != 1 {
                        report.fail_with(json!({
                            "cone": cone_json(sq, r, d),
                            "mediators": found.iter().map(|&i| sq.apex_json(&apexes[i])).collect::<Vec<_>>(),
                        }));
                        break 'cones;
                    }
                }
            }
        }
        Mode::Randomized | Mode::SolverAsserted => {
            let mut cones = sq.probe_cones().into_iter().map(Ok).collect::<Vec<_>>().into_iter();
            let mut t = 0u64;
            loop {
                let (r, d) = match cones.next() {
                    Some(c) => c?,
                    None if t < trials => {
                        t += 1;
                        match skip_bound(sq.sample_cone(&mut trial_rng(seed, t - 1)), &mut skipped)? {
                            Some(c) => c,
                            None => continue,
                        }
                    }
                    None => break,
                };
                examined += 1;
                let (Some(rt), Some(dt)) =
                    (skip_bound(sq.right(&r), &mut skipped)?, skip_bound(sq.bottom(&d), &mut skipped)?)
                else {
                    continue;
                };
                if rt != dt {
                    return Err(Error::InvariantViolation(format!(
                        "sampler produced an incompatible cone for {}",
                        sq.name()
                    )));
                }
                let med = match sq.mediate(&r, &d) {
                    None => return Err(Error::NoSolverForRandomized(sq.name())),
                    Some(m) => match skip_bound(m, &mut skipped)? {
                        Some(m) => m,
                        None => continue,
                    },
                };
                let verify = |a: &S::Apex| -> Result<()> {
                    if sq.top(a)? != r || sq.left(a)? != d {
                        return Err(Error::InvariantViolation(format!(
                            "solver for {} returned a non-mediating element",
                            sq.name()
                        )));
                    }
                    Ok(())
                };
                match med {
                    Mediation::Unique(a) => verify(&a)?,
                    Mediation::Missing { reason } => {
                        report.fail_with(json!({ "cone": cone_json(sq, &r, &d), "mediators": [], "reason": reason }));
                        break;
                    }
                    Mediation::Multiple(a, b) => {
                        verify(&a)?;
                        verify(&b)?;
                        report.fail_with(json!({
                            "cone": cone_json(sq, &r, &d),
                            "mediators": [sq.apex_json(&a), sq.apex_json(&b)],
                        }));
                        break;
                    }
                }
            }
        }
    }
    report.trials = examined;
    if skipped > 0 {
        report.notes.push(format!("{skipped} cases skipped: multiplicity bound exceeded"));
    }
    report.label_randomized();
    Ok(report)
}
