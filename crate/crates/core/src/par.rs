//! Ordered data-parallel helpers.
//!
//! Work is split into chunks whose boundaries depend only on the problem size,
//! never on the number of worker threads. Each chunk is reduced sequentially
//! and the per-chunk results are returned in index order, so every reduction
//! built on top of these helpers is bit-identical between the parallel and the
//! sequential build and across thread counts.
//!
//! With the `parallel` feature disabled all helpers run on the calling thread.

use std::ops::Range;

/// Default number of indices handled by a single chunk.
pub const DEFAULT_CHUNK: usize = 4096;

/// Splits `0..len` into consecutive ranges of at most `chunk` indices.
pub fn chunk_ranges(len: usize, chunk: usize) -> Vec<Range<usize>> {
    let chunk = chunk.max(1);
    (0..len)
        .step_by(chunk)
        .map(|start| start..(start + chunk).min(len))
        .collect()
}

/// Applies `f` to every chunk of `0..len` and returns the results in chunk order.
pub fn map_chunks<T, F>(len: usize, chunk: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<usize>) -> T + Sync + Send,
{
    let ranges = chunk_ranges(len, chunk);
    map_ordered(&ranges, |r| f(r.clone()))
}

/// Maps `f` over `items`, preserving order.
#[cfg(feature = "parallel")]
pub fn map_ordered<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_ordered<I, T, F>(items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Runs `f` inside a pool capped at `threads` workers.
///
/// In the sequential build this simply calls `f`.
#[cfg(feature = "parallel")]
pub fn with_threads<R, F>(threads: usize, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_threads<R, F>(_threads: usize, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    f()
}

/// Caps the global worker pool. Returns `false` if the pool was already built.
#[cfg(feature = "parallel")]
pub fn init_global_threads(threads: usize) -> bool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build_global()
        .is_ok()
}

#[cfg(not(feature = "parallel"))]
pub fn init_global_threads(_threads: usize) -> bool {
    true
}

/// Number of workers the current pool uses (1 in the sequential build).
#[cfg(feature = "parallel")]
pub fn current_threads() -> usize {
    rayon::current_num_threads()
}

#[cfg(not(feature = "parallel"))]
pub fn current_threads() -> usize {
    1
}

/// Whether the crate was compiled with the `parallel` feature.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chunks_cover_range_in_order() {
        let r = chunk_ranges(10, 4);
        assert_eq!(r, vec![0..4, 4..8, 8..10]);
        assert!(chunk_ranges(0, 4).is_empty());
    }

    #[test]
    fn reduction_is_thread_count_independent() {
        let sum = |threads| {
            with_threads(threads, || {
                map_chunks(100_000, 1000, |r| r.map(|i| (i as f64).sqrt()).sum::<f64>())
                    .into_iter()
                    .sum::<f64>()
            })
        };
        assert_eq!(sum(1).to_bits(), sum(4).to_bits());
    }
}
