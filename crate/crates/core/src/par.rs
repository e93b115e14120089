//! Data-parallel primitives with a sequential fallback.
//!
//! Everything here is deterministic for a fixed thread count: parallel
//! reductions run over fixed-size chunks whose partial results are combined
//! in index order, so floating-point sums do not depend on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Chunk size for deterministic reductions. Large enough to amortize
/// scheduling, small enough to keep all cores busy on a 512^2 grid.
pub(crate) const CHUNK: usize = 1 << 14;

/// Apply `f` to every element in place.
pub(crate) fn for_each_mut<T, F>(data: &mut [T], f: F)
where
    T: Send,
    F: Fn(&mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(CHUNK).for_each(|chunk| {
            for v in chunk {
                f(v);
            }
        });
    }
    #[cfg(not(feature = "parallel"))]
    {
        for v in data {
            f(v);
        }
    }
}

/// Apply `f(index, element)` to every element in place.
pub(crate) fn for_each_indexed_mut<T, F>(data: &mut [T], f: F)
where
    T: Send,
    F: Fn(usize, &mut T) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(CHUNK)
            .enumerate()
            .for_each(|(c, chunk)| {
                let base = c * CHUNK;
                for (i, v) in chunk.iter_mut().enumerate() {
                    f(base + i, v);
                }
            });
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (i, v) in data.iter_mut().enumerate() {
            f(i, v);
        }
    }
}

/// Deterministic reduction: map each fixed chunk to a partial value, then
/// fold the partials in chunk order.
pub(crate) fn reduce_chunks<T, A, M, F>(data: &[T], map: M, fold: F) -> Option<A>
where
    T: Sync,
    A: Send,
    M: Fn(&[T]) -> A + Sync + Send,
    F: Fn(A, A) -> A,
{
    let partials: Vec<A>;
    #[cfg(feature = "parallel")]
    {
        partials = data.par_chunks(CHUNK).map(&map).collect();
    }
    #[cfg(not(feature = "parallel"))]
    {
        partials = data.chunks(CHUNK).map(&map).collect();
    }
    partials.into_iter().reduce(fold)
}

/// Run `f(row_index, row)` over disjoint rows of a row-major matrix.
pub(crate) fn for_each_row_mut<T, F>(data: &mut [T], row_len: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    debug_assert_eq!(data.len() % row_len, 0);
    #[cfg(feature = "parallel")]
    {
        data.par_chunks_mut(row_len)
            .enumerate()
            .for_each(|(r, row)| f(r, row));
    }
    #[cfg(not(feature = "parallel"))]
    {
        for (r, row) in data.chunks_mut(row_len).enumerate() {
            f(r, row);
        }
    }
}

/// Max of |a[i] - b[i]| over paired slices, chunked deterministically.
pub(crate) fn sup_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let n = a.len();
    let n_chunks = n.div_ceil(CHUNK);
    let partials: Vec<f64> = map_indices(n_chunks, |c| {
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(n);
        a[lo..hi]
            .iter()
            .zip(&b[lo..hi])
            .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
    });
    partials.into_iter().fold(0.0, f64::max)
}

/// Map indices 0..n to values, preserving order.
pub(crate) fn map_indices<A, F>(n: usize, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(usize) -> A + Sync + Send,
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
