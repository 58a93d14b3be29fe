//! Execution helpers behind the batch APIs.
//!
//! With the `parallel` feature (default) these fan work out over the rayon
//! pool; without it they run serially. Results are always collected in index
//! order and reductions happen over fixed-size chunks, so both paths — and
//! any worker count — produce bit-identical output.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` over `0..n`, collecting results in index order.
pub fn map_indexed<U, F>(n: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Applies `f` to half-open index ranges of at most `chunk` elements,
/// collecting per-chunk results in chunk order. Chunk boundaries depend only
/// on `n` and `chunk`, never on the worker count.
pub fn map_chunks<U, F>(n: usize, chunk: usize, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(std::ops::Range<usize>) -> U + Sync + Send,
{
    assert!(chunk > 0, "chunk size must be positive");
    let ranges: Vec<_> = (0..n.div_ceil(chunk))
        .map(|i| i * chunk..((i + 1) * chunk).min(n))
        .collect();
    #[cfg(feature = "parallel")]
    {
        ranges.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        ranges.into_iter().map(f).collect()
    }
}

/// Pins the global worker pool to `n` threads. Call once, before any
/// parallel work. Without the `parallel` feature this is a no-op.
pub fn configure_workers(n: usize) -> crate::Result<()> {
    if n == 0 {
        return Err(crate::Error::Config("worker count must be positive".into()));
    }
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| crate::Error::Config(format!("worker pool: {e}")))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_indexed_preserves_order() {
        let out = map_indexed(100, |i| i * i);
        assert_eq!(out, (0..100).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn map_chunks_covers_all_indices_once() {
        let ranges = map_chunks(103, 16, |r| r);
        let flat: Vec<usize> = ranges.into_iter().flatten().collect();
        assert_eq!(flat, (0..103).collect::<Vec<_>>());
    }
}
