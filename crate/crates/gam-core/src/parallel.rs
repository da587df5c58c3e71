//! Deterministic block-parallel execution.
//!
//! Monte-Carlo estimators and quadrature grids split their index space into
//! blocks, map each block independently, and reduce the per-block results in
//! index order. The mapping may fan out over a rayon pool (feature
//! `parallel`, on by default) or run sequentially (feature off), and the
//! reduction is always the same sequential fold, so results are bit-identical
//! for any worker count.

/// Map `0..n_blocks` to values, in parallel when the `parallel` feature is
/// enabled. The returned vector is ordered by block index either way.
#[cfg(feature = "parallel")]
pub fn map_blocks<T, F>(n_blocks: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n_blocks).into_par_iter().map(f).collect()
}

/// Sequential fallback used when the `parallel` feature is disabled.
#[cfg(not(feature = "parallel"))]
pub fn map_blocks<T, F>(n_blocks: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n_blocks).map(f).collect()
}

/// Configure the global worker pool. `None` keeps the default (hardware
/// parallelism). Calling this more than once, or after the pool has already
/// been used, has no effect; without the `parallel` feature it is a no-op.
pub fn configure_workers(workers: Option<usize>) {
    #[cfg(feature = "parallel")]
    if let Some(n) = workers {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = workers;
}

/// Number of workers the global pool will use for block mapping.
pub fn current_workers() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_blocks_preserves_order() {
        let v = map_blocks(100, |b| b * b);
        assert_eq!(v.len(), 100);
        for (i, x) in v.iter().enumerate() {
            assert_eq!(*x, i * i);
        }
    }
}
