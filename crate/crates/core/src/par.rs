//! Execution mode switch for the data-parallel loops (Monte Carlo trials,
//! exhaustive enumeration, campaign rows).
//!
//! With the `parallel` feature off, [`Execution::Parallel`] quietly runs the
//! sequential path. Every caller derives per-item state from the item index
//! alone, so both paths return identical results.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this mode will actually fan out on the current build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps `f` over `0..len`, preserving index order in the output.
pub fn map_range<T, F>(exec: Execution, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return (0..len).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..len).map(f).collect()
}

/// Maps `f` over a slice, preserving order.
pub fn map_slice<S, T, F>(exec: Execution, items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    let _ = exec;
    items.iter().map(f).collect()
}

/// Folds `0..len` in contiguous chunks: each chunk is folded with `fold`
/// from `init()`, then chunk results are merged left-to-right with `merge`.
/// Chunk boundaries do not depend on the mode, so an associative `merge`
/// yields mode-independent results.
pub fn fold_range<A, I, F, M>(exec: Execution, len: u64, init: I, fold: F, merge: M) -> A
where
    A: Send,
    I: Fn() -> A + Sync + Send,
    F: Fn(A, u64) -> A + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    const CHUNK: u64 = 256;
    let chunks = len.div_ceil(CHUNK) as usize;
    let run_chunk = |c: usize| {
        let start = c as u64 * CHUNK;
        let end = (start + CHUNK).min(len);
        (start..end).fold(init(), &fold)
    };
    let parts = map_range(exec, chunks, run_chunk);
    parts.into_iter().fold(init(), merge)
}
