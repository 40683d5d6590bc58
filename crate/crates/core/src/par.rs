//! Deterministic chunked map over index ranges.
//!
//! Chunk boundaries depend only on the length, never on the worker count, and
//! partial results come back in chunk order, so any fold over them gives the
//! same answer under every thread pool size.

use std::ops::Range;

use rayon::prelude::*;

pub const CHUNK: u64 = 1024;

/// Maps `f` over `0..len` split into fixed-size chunks, in parallel on the
/// current rayon pool. Results are ordered by chunk.
pub fn map_chunks<T, F>(len: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    let chunks = len.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| f(c * CHUNK..((c + 1) * CHUNK).min(len)))
        .collect()
}

/// Per-value counts summed elementwise.
pub fn merge_counts(parts: Vec<Vec<u64>>, width: usize) -> Vec<u64> {
    let mut out = vec![0u64; width];
    for part in parts {
        for (o, v) in out.iter_mut().zip(part) {
            *o += v;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn covers_range_in_order() {
        let parts = map_chunks(2500, |r| r.collect::<Vec<_>>());
        assert_eq!(parts.len(), 3);
        let flat: Vec<u64> = parts.into_iter().flatten().collect();
        assert_eq!(flat, (0..2500).collect::<Vec<_>>());
        assert!(map_chunks(0, |r| r.count()).is_empty());
    }
}
