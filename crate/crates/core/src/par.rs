//! Chunked data-parallel execution.
//!
//! Work is split into a fixed number of chunks whose boundaries depend only
//! on the problem size. Each chunk's result is returned in chunk order, so
//! callers that merge with exact arithmetic (integer tallies) or fold in
//! order get identical output for any thread count, and for the sequential
//! fallback.
//!
//! The `parallel` feature (on by default) runs chunks on the rayon pool.
//! Without it, [`Execution::Parallel`] silently runs sequentially.

use std::ops::Range;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Splits `0..total` into ranges of at most `chunk` items.
pub fn chunk_ranges(total: u64, chunk: u64) -> Vec<Range<u64>> {
    assert!(chunk > 0);
    let mut out = Vec::with_capacity(total.div_ceil(chunk) as usize);
    let mut start = 0;
    while start < total {
        let end = (start + chunk).min(total);
        out.push(start..end);
        start = end;
    }
    out
}

/// Applies `f(chunk_index, range)` to every chunk and returns results in
/// chunk order.
pub fn map_chunks<T, F>(exec: Execution, total: u64, chunk: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, Range<u64>) -> T + Sync + Send,
{
    let ranges = chunk_ranges(total, chunk);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return ranges
            .into_par_iter()
            .enumerate()
            .map(|(i, r)| f(i as u64, r))
            .collect();
    }
    let _ = exec;
    ranges
        .into_iter()
        .enumerate()
        .map(|(i, r)| f(i as u64, r))
        .collect()
}

/// Maps `f` over `items` preserving order.
pub fn map_items<I, T, F>(exec: Execution, items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(usize, &I) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return items.par_iter().enumerate().map(|(i, x)| f(i, x)).collect();
    }
    let _ = exec;
    items.iter().enumerate().map(|(i, x)| f(i, x)).collect()
}

/// Element-wise sum of equal-length tallies.
pub fn sum_tallies(parts: Vec<Vec<u64>>) -> Vec<u64> {
    let mut iter = parts.into_iter();
    let mut acc = iter.next().unwrap_or_default();
    for part in iter {
        assert_eq!(part.len(), acc.len());
        for (a, b) in acc.iter_mut().zip(part) {
            *a += b;
        }
    }
    acc
}
