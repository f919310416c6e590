//! Fixtures shared by the benchmarks.

use gsmon_core::{trial_rng, FinSet, Kernel, MonadInstance};

/// A seeded kernel `X_n → X_m` under `inst`.
pub fn kernel(inst: &MonadInstance, n: usize, m: usize, seed: u64) -> Kernel {
    let dom = FinSet::numbered("A", "a", n);
    let cod = FinSet::numbered("B", "b", m);
    Kernel::sample(inst, &dom, &cod, &mut trial_rng(seed, 0)).expect("sampler accepts bundled instances")
}

/// Two composable seeded kernels `X_n → X_n`.
pub fn pair(inst: &MonadInstance, n: usize, seed: u64) -> (Kernel, Kernel) {
    let f = kernel(inst, n, n, seed);
    let g = Kernel::sample(inst, f.cod(), f.cod(), &mut trial_rng(seed, 1)).expect("sampler accepts bundled instances");
    (f, g)
}
