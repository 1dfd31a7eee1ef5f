//! Data-parallel execution of independent trials.
//!
//! Every parallel loop in the crate goes through [`map_range`] or
//! [`try_map_range`]. Work items are indexed and each index derives its own
//! randomness stream, so results are identical under both policies; only
//! wall time differs. Without the `parallel` feature both policies run
//! sequentially.

use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecPolicy {
    Sequential,
    Parallel,
}

static POLICY: AtomicU8 = AtomicU8::new(if cfg!(feature = "parallel") { 1 } else { 0 });

/// Process-wide policy used by the loops in this crate.
pub fn policy() -> ExecPolicy {
    match POLICY.load(Ordering::Relaxed) {
        0 => ExecPolicy::Sequential,
        _ => ExecPolicy::Parallel,
    }
}

pub fn set_policy(p: ExecPolicy) {
    POLICY.store(
        match p {
            ExecPolicy::Sequential => 0,
            ExecPolicy::Parallel => 1,
        },
        Ordering::Relaxed,
    );
}

/// Evaluate `f(0..n)` and collect results in index order.
pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if policy() == ExecPolicy::Parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Fallible variant of [`map_range`]; the first error in index order wins.
pub fn try_map_range<T, E, F>(n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    map_range(n, f).into_iter().collect()
}
