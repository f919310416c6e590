//! One test per acceptance criterion. Each prints a `[PASS]` or `[FAIL]`
//! line straight to stderr so the verdicts show up without `--nocapture`.

use std::io::Write;

use gsmon_core::exactnum::{assoc_square_is_pullback, group_pullback_agreement, is_group, library, named};
use gsmon_core::gscat::{check_gs_laws, effect_mul, equivalent, mass, normalize, scalar_action};
use gsmon_core::independence::{
    assemble, check_ci, check_ci_n2_equation, check_local_independence, CiMethod, Partition,
};
use gsmon_core::monads::classify;
use gsmon_core::squares::{
    check_commutes, check_pullback, theorem_harness, AssocSquare, PositivitySquare, StrongAffineSquare,
};
use gsmon_core::{
    product, trial_rng, Affinity, CheckReport, Effect, Error, FinSet, FiniteMonoid, Kernel, Mode, MonadInstance, Rat,
    Report, Verdict,
};
use rand::Rng;
use serde_json::{json, Value};

type Outcome = Result<(), String>;

fn criterion(id: &str, title: &str, body: impl FnOnce() -> Outcome) {
    let outcome = body();
    let line = match &outcome {
        Ok(()) => format!("[PASS] {id}: {title}\n"),
        Err(why) => format!("[FAIL] {id}: {title}: {why}\n"),
    };
    let _ = std::io::stderr().write_all(line.as_bytes());
    if let Err(why) = outcome {
        panic!("{id} failed: {why}");
    }
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T>(r: gsmon_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn inst(id: &str) -> MonadInstance {
    MonadInstance::parse(id).unwrap()
}

fn atom(name: &str, n: usize) -> FinSet {
    FinSet::numbered(name, &name.to_lowercase(), n)
}

/// A finite monoid is a group iff left multiplication by every element
/// permutes the carrier.
fn oracle_is_group(m: &FiniteMonoid) -> bool {
    (0..m.len()).all(|a| {
        let mut row: Vec<usize> = (0..m.len()).map(|b| m.mul(a, b)).collect();
        row.sort_unstable();
        row.dedup();
        row.len() == m.len()
    })
}

/// Counts the mediators of every cone by brute force.
fn oracle_assoc_pullback(m: &FiniteMonoid) -> bool {
    let n = m.len();
    let mut all_unique = true;
    for a in 0..n {
        for g in 0..n {
            for h in 0..n {
                for c in 0..n {
                    if m.mul(a, g) == m.mul(h, c) {
                        let count = (0..n).filter(|&b| m.mul(b, c) == g && m.mul(a, b) == h).count();
                        all_unique &= count == 1;
                    }
                }
            }
        }
    }
    all_unique
}

#[test]
fn ac1_group_iff_assoc_pullback() {
    criterion("AC1", "monoid library: group test and associativity pullback agree", || {
        let lib = library();
        ensure!(lib.len() >= 8, "library has only {} monoids", lib.len());
        for m in &lib {
            ensure!(m.len() <= 4, "{} has order {}", m.name(), m.len());
            let g = ok(is_group(m))?;
            let p = ok(assoc_square_is_pullback(m))?;
            ensure!(g.is_group == oracle_is_group(m), "{}: group test disagrees with oracle", m.name());
            ensure!(p.is_pullback == oracle_assoc_pullback(m), "{}: pullback test disagrees with oracle", m.name());
            ensure!(g.is_group == p.is_pullback, "{}: group {} but pullback {}", m.name(), g.is_group, p.is_pullback);
        }
        ensure!(ok(group_pullback_agreement(&lib))?.verdict == Verdict::Pass, "agreement report failed");

        let and = named("AND").unwrap();
        let w = ok(assoc_square_is_pullback(&and))?.witness.ok_or("AND has no witness")?;
        let label = |i: usize| and.label(i).to_string();
        ensure!(
            [label(w.a), label(w.g), label(w.h), label(w.c)] == ["0", "1", "1", "0"],
            "AND witness is ({},{},{},{})",
            label(w.a),
            label(w.g),
            label(w.h),
            label(w.c)
        );
        ensure!(w.mediators.is_empty(), "AND witness cone has a mediator");
        Ok(())
    });
}

#[test]
fn ac2_gs_laws() {
    criterion("AC2", "copy/discard laws hold for every instance up to size 3", || {
        for id in ["Id", "D", "M", "M*", "P", "P*", "writer:Z2", "writer:Z3", "writer:AND", "F:16"] {
            let r = ok(check_gs_laws(&inst(id), 3))?;
            ensure!(r.passed(), "{id}: {}", r.witness.unwrap_or(Value::Null));
            ensure!(r.trials > 0, "{id}: nothing checked");
        }
        Ok(())
    });
}

#[test]
fn ac3_classification_table() {
    criterion("AC3", "classification table with witnesses", || {
        use Affinity::*;
        let table = [
            ("D", Affine),
            ("P*", Affine),
            ("Id", Affine),
            ("M*", WeaklyAffineNotAffine),
            ("M", NotWeaklyAffine),
            ("P", NotWeaklyAffine),
            ("writer:AND", NotWeaklyAffine),
            ("F", NotWeaklyAffine),
        ];
        for (id, want) in table {
            let c = ok(classify(&inst(id)))?;
            ensure!(c.affinity == want, "{id}: {} instead of {}", c.affinity, want);
            if want == NotWeaklyAffine {
                ensure!(c.witness.is_some(), "{id}: no witness");
            }
        }
        let scalar = |id: &str| ok(classify(&inst(id))).map(|c| c.witness.unwrap()["scalar"].clone());
        ensure!(scalar("M")? == json!("0"), "M witness {}", scalar("M")?);
        ensure!(scalar("F")? == json!(2), "F witness {}", scalar("F")?);
        ensure!(inst("F") == MonadInstance::free_abelian(16), "default bound is not 16");
        ensure!(scalar("writer:AND")? == json!("0"), "AND witness {}", scalar("writer:AND")?);
        ensure!(scalar("P")? == json!([]), "P witness {}", scalar("P")?);

        for m in library() {
            let c = ok(classify(&MonadInstance::writer(m.clone())))?;
            ensure!(
                c.affinity.is_weakly_affine() == oracle_is_group(&m),
                "writer:{}: {} but group = {}",
                m.name(),
                c.affinity,
                oracle_is_group(&m)
            );
            ensure!((c.affinity == Affine) == (m.len() == 1), "writer:{}: affine iff trivial", m.name());
        }
        Ok(())
    });
}

fn harness_outcomes(r: &CheckReport) -> [bool; 3] {
    let d = r.details.as_ref().expect("harness details");
    ["group", "effects_invertible", "assoc_pullbacks"].map(|k| d[k]["holds"].as_bool().expect("bool"))
}

#[test]
fn ac4a_exhaustive_harness() {
    criterion("AC4a", "three conditions agree exhaustively on finite instances", || {
        let triples = [[1, 1, 1], [2, 1, 1], [2, 2, 2]];
        for (id, expected) in [
            ("writer:Z1", true),
            ("writer:Z2", true),
            ("writer:Z3", true),
            ("writer:AND", false),
            ("P", false),
            ("P*", true),
            ("Id", true),
        ] {
            let r = ok(theorem_harness(&inst(id), &triples, Mode::Exhaustive, 0, 0))?;
            ensure!(r.mode == Mode::Exhaustive, "{id}: mode {}", r.mode);
            ensure!(r.passed(), "{id}: conditions disagree: {}", r.witness.unwrap_or(Value::Null));
            ensure!(harness_outcomes(&r) == [expected; 3], "{id}: outcomes {:?}", harness_outcomes(&r));
        }
        Ok(())
    });
}

#[test]
fn ac4b_nonzero_measures_randomized() {
    criterion("AC4b", "M*: 1000 solver-verified cones, seed 11", || {
        let mstar = MonadInstance::nonzero_measure();
        let sq = AssocSquare::with_sizes(&mstar, [2, 2, 2]);
        let r = ok(check_pullback(&sq, Mode::Randomized, 1000, 11))?;
        ensure!(r.passed(), "witness {}", r.witness.unwrap_or(Value::Null));
        ensure!(r.trials == 1000, "{} cones examined", r.trials);
        ensure!(r.notes.iter().any(|n| n.contains("no counterexample found in 1000 trials")), "missing caveat");
        let again = ok(check_pullback(&sq, Mode::Randomized, 1000, 11))?;
        ensure!(r == again, "rerun differs");

        let h = ok(theorem_harness(&mstar, &[[1, 1, 1], [2, 2, 2]], Mode::Randomized, 1000, 11))?;
        ensure!(h.passed(), "harness disagreement {}", h.witness.unwrap_or(Value::Null));
        ensure!(harness_outcomes(&h) == [true; 3], "outcomes {:?}", harness_outcomes(&h));
        Ok(())
    });
}

#[test]
fn ac4c_measure_counterexample() {
    criterion("AC4c", "M: associativity pullback refuted by ((0,p),(q,0))", || {
        for sizes in [[1, 1, 1], [2, 1, 2], [2, 2, 2]] {
            let sq = AssocSquare::with_sizes(&MonadInstance::measure(), sizes);
            let r = ok(check_pullback(&sq, Mode::Randomized, 100, 0))?;
            ensure!(!r.passed(), "{sizes:?}: not refuted");
            let w = r.witness.ok_or("no witness")?;
            let cone = &w["cone"];
            let zero = json!({});
            ensure!(cone["right"][0]["entries"] == zero, "{sizes:?}: right u is not 0: {cone}");
            ensure!(cone["right"][1]["entries"] != zero, "{sizes:?}: p is 0: {cone}");
            ensure!(cone["down"][0]["entries"] != zero, "{sizes:?}: q is 0: {cone}");
            ensure!(cone["down"][1]["entries"] == zero, "{sizes:?}: down z is not 0: {cone}");
        }
        let h = ok(theorem_harness(&MonadInstance::measure(), &[[1, 1, 1]], Mode::Randomized, 200, 5))?;
        ensure!(h.passed() && harness_outcomes(&h) == [false; 3], "M harness {:?}", harness_outcomes(&h));
        Ok(())
    });
}

fn random_kernel(inst: &MonadInstance, seed: u64, t: u64, max: usize) -> Kernel {
    let mut rng = trial_rng(seed, t);
    let a = atom("A", rng.random_range(1..=max));
    let x = atom("X", rng.random_range(1..=max));
    Kernel::sample(inst, &a, &x, &mut rng).unwrap()
}

fn rat_column(k: &Kernel, a: usize) -> Vec<Rat> {
    k.column(a).weights().expect("weights").to_vec()
}

#[test]
fn ac5_normalization() {
    criterion("AC5", "normalization of 200 M* kernels; zero columns of M", || {
        let mstar = MonadInstance::nonzero_measure();
        for t in 0..200 {
            let f = random_kernel(&mstar, 5, t, 3);
            let n = ok(normalize(&f))?;
            ensure!(ok(n.kernel.is_discardable())?, "trial {t}: n_f not discardable");
            ensure!(ok(scalar_action(&n.mass, &n.kernel))? == f, "trial {t}: f != mass·n_f");
            ensure!(n.mass == mass(&f), "trial {t}: mass mismatch");
            for a in 0..f.dom().len() {
                let w = rat_column(&f, a);
                let total: Rat = w.iter().sum();
                let expected: Vec<Rat> = w.iter().map(|x| x / &total).collect();
                ensure!(rat_column(&n.kernel, a) == expected, "trial {t}: column {a} differs from f/Σf");
            }
            let twice = ok(normalize(&n.kernel))?;
            ensure!(twice.kernel == n.kernel, "trial {t}: not idempotent");
            ensure!(twice.mass == Effect::discard(&mstar, f.dom()), "trial {t}: n_f has non-unit mass");

            // Freeness: the scalar relating f to a·f is a, and only a.
            let mut rng = trial_rng(6, t);
            let one = FinSet::unit();
            let a = ok(Effect::new(ok(Kernel::sample(&mstar, f.dom(), &one, &mut rng))?))?;
            let b = ok(Effect::new(ok(Kernel::sample(&mstar, f.dom(), &one, &mut rng))?))?;
            let af = ok(scalar_action(&a, &f))?;
            ensure!(ok(equivalent(&f, &af))? == Some(a.clone()), "trial {t}: equivalence scalar is not a");
            let bf = ok(scalar_action(&b, &f))?;
            ensure!((af == bf) == (a == b), "trial {t}: action not free");
            let ab = ok(effect_mul(&a, &b))?;
            ensure!(ok(scalar_action(&ab, &f))? == ok(scalar_action(&a, &bf))?, "trial {t}: action not associative");
        }

        let m = MonadInstance::measure();
        for t in 0..50 {
            let f = random_kernel(&m, 7, t, 3);
            let mut cols = f.columns().to_vec();
            let i = t as usize % cols.len();
            cols[i] = m.zero(f.cod()).unwrap();
            let g = ok(Kernel::new(&m, f.dom(), f.cod(), cols))?;
            match normalize(&g) {
                Err(Error::NotNormalizable { witness }) => {
                    let w: Value = serde_json::from_str(&witness).map_err(|e| e.to_string())?;
                    ensure!(w["scalar"] == json!("0"), "trial {t}: witness {w}");
                }
                other => return Err(format!("trial {t}: expected NotNormalizable, got {other:?}")),
            }
        }
        Ok(())
    });
}

fn partitions(arity: usize) -> Vec<Partition> {
    let mut out = vec![Partition::singletons(arity)];
    if arity == 3 {
        out.push(Partition::new(vec![vec![0, 1], vec![2]], 3).unwrap());
        out.push(Partition::new(vec![vec![0], vec![1, 2]], 3).unwrap());
        out.push(Partition::new(vec![vec![0, 2], vec![1]], 3).unwrap());
    }
    out
}

/// A binary M* kernel that is conditionally independent on even trials.
fn binary_kernel(mstar: &MonadInstance, t: u64) -> Kernel {
    let mut rng = trial_rng(21, t);
    let a = atom("A", rng.random_range(1..=2));
    let x = atom("X", rng.random_range(1..=3));
    let y = atom("Y", rng.random_range(1..=3));
    let cod = x.times(&y);
    if t.is_multiple_of(2) {
        let g1 = Kernel::sample(mstar, &a, &x, &mut rng).unwrap();
        let g2 = Kernel::sample(mstar, &a, &y, &mut rng).unwrap();
        let s = Effect::new(Kernel::sample(mstar, &a, &FinSet::unit(), &mut rng).unwrap()).unwrap();
        scalar_action(&s, &assemble(&[g1, g2], &Partition::singletons(2), &cod).unwrap()).unwrap()
    } else {
        Kernel::sample(mstar, &a, &cod, &mut rng).unwrap()
    }
}

#[test]
fn ac6_conditional_independence() {
    criterion("AC6", "conditional independence: zero kernels, method agreement, n=2 equation, diagonal", || {
        let m = MonadInstance::measure();
        for na in 1..=2 {
            let a = atom("A", na);
            for shape in [vec![1, 1], vec![1, 2], vec![2, 2], vec![1, 1, 1], vec![2, 1, 2], vec![2, 2, 2]] {
                let names = ["X", "Y", "Z"];
                let cod = product(&shape.iter().zip(names).map(|(&n, s)| atom(s, n)).collect::<Vec<_>>());
                let zero = Kernel::zero(&m, &a, &cod).unwrap();
                for p in partitions(shape.len()) {
                    for method in [CiMethod::Auto, CiMethod::Rank1] {
                        let r = ok(check_ci(&zero, &p, method))?;
                        ensure!(r.holds, "zero kernel {shape:?} {:?} via {method:?}", p.blocks());
                    }
                }
            }
        }

        let z2 = inst("writer:Z2");
        let mut compared = 0;
        for (na, nx, ny) in [(1, 1, 1), (1, 1, 2), (1, 2, 2), (2, 1, 2), (2, 2, 1), (2, 2, 2)] {
            let (a, x, y) = (atom("A", na), atom("X", nx), atom("Y", ny));
            let p = Partition::singletons(2);
            for f in ok(Kernel::enumerate_all(&z2, &a, &x.times(&y)))? {
                let s = ok(check_ci(&f, &p, CiMethod::ExhaustiveSearch))?;
                let e = ok(check_ci(&f, &p, CiMethod::Equivalence))?;
                ensure!(s.holds == e.holds, "Z2 disagreement on {}", f.to_json());
                compared += 1;
            }
        }
        ensure!(compared > 0, "no Z2 kernels compared");

        let mstar = MonadInstance::nonzero_measure();
        let p = Partition::singletons(2);
        let mut held = 0;
        for t in 0..500 {
            let f = binary_kernel(&mstar, t);
            let eq = ok(check_ci(&f, &p, CiMethod::Equivalence))?.holds;
            ensure!(ok(check_ci_n2_equation(&f, &p))? == eq, "trial {t}: n=2 equation disagrees");
            held += eq as u32;
        }
        ensure!((250..500).contains(&held), "corpus is one-sided: {held} of 500 independent");

        let a = atom("A", 1);
        let cod = atom("X", 2).times(&atom("Y", 2));
        let one = Rat::one;
        let diag = ok(m.weights(&cod, vec![one(), Rat::zero(), Rat::zero(), one()]))?;
        let f = ok(Kernel::new(&m, &a, &cod, vec![diag]))?;
        ensure!(!ok(check_ci(&f, &p, CiMethod::Rank1))?.holds, "diagonal passed rank-1");
        Ok(())
    });
}

fn constructive_ternary(inst: &MonadInstance, seed: u64, t: u64) -> Kernel {
    let mut rng = trial_rng(seed, t);
    let a = atom("A", rng.random_range(1..=2));
    let sets: Vec<FinSet> = ["X", "Y", "Z"].iter().map(|s| atom(s, rng.random_range(1..=2))).collect();
    let gs: Vec<Kernel> = sets.iter().map(|s| Kernel::sample(inst, &a, s, &mut rng).unwrap()).collect();
    let s = Effect::new(Kernel::sample(inst, &a, &FinSet::unit(), &mut rng).unwrap()).unwrap();
    scalar_action(&s, &assemble(&gs, &Partition::singletons(3), &product(&sets)).unwrap()).unwrap()
}

#[test]
fn ac7_localised_independence() {
    criterion("AC7", "localised independence on constructive instances and the zero measure", || {
        let p = Partition::singletons(3);
        for id in ["M*", "writer:Z3"] {
            let i = inst(id);
            for t in 0..500 {
                let f = constructive_ternary(&i, 31, t);
                let r = ok(check_local_independence(&f, &p, CiMethod::Auto))?;
                ensure!(r.verdict == Verdict::Pass, "{id} trial {t}: {:?} {:?}", r.verdict, r.details);
                let d = r.details.unwrap();
                ensure!(d["premise_xy_z"] == true && d["premise_x_yz"] == true, "{id} trial {t}: premise failed");
                ensure!(d["conclusion"] == true, "{id} trial {t}: conclusion failed");
            }
        }
        let m = MonadInstance::measure();
        for n in 1..=2 {
            let cod = product(&[atom("X", n), atom("Y", 2), atom("Z", n)]);
            let zero = Kernel::zero(&m, &atom("A", n), &cod).unwrap();
            let r = ok(check_local_independence(&zero, &p, CiMethod::Auto))?;
            ensure!(r.verdict == Verdict::Pass, "zero kernel: {:?}", r.verdict);
            ensure!(r.details.unwrap()["conclusion"] == true, "zero kernel conclusion");
        }
        Ok(())
    });
}

#[test]
fn ac8_strength_squares() {
    criterion("AC8", "strongly affine and positivity squares", || {
        let m = MonadInstance::measure();
        let sq = StrongAffineSquare::new(&m, &atom("X", 1), &atom("Y", 1));
        let r = ok(check_commutes(&sq, Mode::Randomized, 500, 8))?;
        ensure!(!r.passed(), "strongly affine square for M commutes");
        let w = r.witness.unwrap();
        ensure!(w["apex"] == json!(["x1", {"monad": "M", "base": "Y", "entries": {}}]), "witness {}", w["apex"]);

        for i in MonadInstance::all_bundled() {
            let sq = PositivitySquare::with_sizes(&i, [2, 2]);
            let (mode, trials) = if i.is_enumerable() { (Mode::Exhaustive, 0) } else { (Mode::Randomized, 500) };
            let r = ok(check_commutes(&sq, mode, trials, 8))?;
            ensure!(r.passed(), "positivity square for {} does not commute: {:?}", i.id(), r.witness);
            ensure!(r.mode == mode, "{}: mode {}", i.id(), r.mode);
        }

        let d = MonadInstance::distribution();
        let r = ok(check_pullback(&StrongAffineSquare::with_sizes(&d, [2, 3]), Mode::Randomized, 500, 8))?;
        ensure!(r.passed(), "D strongly affine: {}", r.witness.unwrap_or(Value::Null));
        ensure!(r.trials == 500, "{} cones", r.trials);
        Ok(())
    });
}

fn randomized_reports(seed: u64) -> String {
    let mstar = MonadInstance::nonzero_measure();
    let d = MonadInstance::distribution();
    let checks = vec![
        check_pullback(&AssocSquare::with_sizes(&mstar, [2, 2, 2]), Mode::Randomized, 300, seed).unwrap(),
        theorem_harness(&MonadInstance::measure(), &[[1, 1, 1]], Mode::Randomized, 100, seed).unwrap(),
        check_pullback(&StrongAffineSquare::with_sizes(&d, [2, 2]), Mode::Randomized, 300, seed).unwrap(),
        check_commutes(&PositivitySquare::with_sizes(&inst("F"), [2, 2]), Mode::Randomized, 300, seed).unwrap(),
        gsmon_core::monads::check_monad_laws(&mstar, &[1, 2], Mode::Randomized, 50, seed).unwrap(),
    ];
    Report::new("test", json!({ "seed": seed }), checks).to_json_string()
}

#[test]
fn ac9_determinism() {
    criterion("AC9", "randomized reports are byte-identical for equal seeds", || {
        let a = randomized_reports(11);
        let b = randomized_reports(11);
        ensure!(a == b, "reports differ for the same seed");
        let c = randomized_reports(12);
        ensure!(a != c, "seed has no effect");
        Ok(())
    });
}
