//! Comonoid and multiplicativity equations of the copy/discard structure.

use serde_json::{json, Value};

use crate::error::Result;
use crate::finset::{FinFun, FinSet};
use crate::monads::{unit_square_collapse, MonadInstance};
use crate::report::{CheckReport, Mode};

use super::kernel::{compose, drop_leading_unit, drop_trailing_unit, tensor, Kernel};

fn objects(max_size: usize) -> Vec<FinSet> {
    let mut out = vec![FinSet::unit()];
    out.extend((1..=max_size).map(|n| FinSet::numbered(&format!("X{n}"), "x", n)));
    out
}

struct Tally {
    checked: u64,
    witness: Option<Value>,
}

impl Tally {
    fn expect(&mut self, equation: &str, objects: &[&FinSet], lhs: &Kernel, rhs: &Kernel) {
        self.checked += 1;
        if lhs != rhs && self.witness.is_none() {
            self.witness = Some(json!({
                "equation": equation,
                "objects": objects.iter().map(|o| o.name().into_owned()).collect::<Vec<_>>(),
                "lhs": lhs.to_json(),
                "rhs": rhs.to_json(),
            }));
        }
    }
}

/// Checks coassociativity, both counit laws, cocommutativity, the swap
/// involution and multiplicativity of copy and discard on `I` and on atoms
/// of size `1..=max_size` (pairs of them for the two-object equations).
pub fn check_gs_laws(inst: &MonadInstance, max_size: usize) -> Result<CheckReport> {
    let mut report = CheckReport::new(
        format!("gs-laws:{}", inst.id()),
        "copy/discard form commutative comonoids, multiplicative in ⊗, with swap a symmetry",
        Mode::Exhaustive,
    );
    let mut t = Tally { checked: 0, witness: None };
    let objs = objects(max_size);
    let id = |x: &FinSet| Kernel::identity(inst, x);

    for x in &objs {
        let copy = Kernel::copy(inst, x);
        let del = Kernel::discard(inst, x);

        let left = compose(&tensor(&copy, &id(x))?, &copy)?;
        let right = compose(&tensor(&id(x), &copy)?, &copy)?;
        t.expect("(copy⊗id)∘copy = (id⊗copy)∘copy", &[x], &left, &right);

        let counit_l = compose(&tensor(&del, &id(x))?, &copy)?.post(&drop_leading_unit(x))?;
        t.expect("(del⊗id)∘copy = id", &[x], &counit_l, &id(x));
        let counit_r = compose(&tensor(&id(x), &del)?, &copy)?.post(&drop_trailing_unit(x))?;
        t.expect("(id⊗del)∘copy = id", &[x], &counit_r, &id(x));

        let swapped = compose(&Kernel::swap(inst, x, x), &copy)?;
        t.expect("swap∘copy = copy", &[x], &swapped, &copy);
    }

    for x in &objs {
        for y in &objs {
            let sw = compose(&Kernel::swap(inst, y, x), &Kernel::swap(inst, x, y))?;
            t.expect("swap∘swap = id", &[x, y], &sw, &id(&x.times(y)));

            let xy = x.times(y);
            let middle = tensor(&tensor(&id(x), &Kernel::swap(inst, x, y))?, &id(y))?;
            let split = compose(&middle, &tensor(&Kernel::copy(inst, x), &Kernel::copy(inst, y))?)?;
            t.expect("copy_{X⊗Y} = (id⊗swap⊗id)∘(copy⊗copy)", &[x, y], &Kernel::copy(inst, &xy), &split);

            let dels = tensor(&Kernel::discard(inst, x), &Kernel::discard(inst, y))?.post(&unit_square_collapse())?;
            t.expect("del_{X⊗Y} = del⊗del", &[x, y], &Kernel::discard(inst, &xy), &dels);
        }
    }

    let one = FinSet::unit();
    t.expect("del_I = id_I", &[&one], &Kernel::discard(inst, &one), &id(&one));
    let copy_i = Kernel::copy(inst, &one).post(&unit_square_collapse())?;
    t.expect("copy_I = (I ≅ I⊗I)", &[&one], &copy_i, &id(&one));
    let back = FinFun::diagonal(&one, 2);
    t.expect("copy_I is the unitor", &[&one], &Kernel::copy(inst, &one), &Kernel::from_fun(inst, &back));

    report.trials = t.checked;
    if let Some(w) = t.witness {
        report.fail_with(w);
    }
    Ok(report)
}
