//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature the [`Execution::Parallel`] mode runs on the
//! rayon global pool (sized by `RAYON_NUM_THREADS`). Without the feature it
//! silently runs sequentially. Results are always returned in index order.

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// `f(0), f(1), ..., f(len - 1)` collected in order.
pub fn map_indices<R, F>(exec: Execution, len: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..len).into_par_iter().map(f).collect()
        }
        _ => (0..len).map(f).collect(),
    }
}

/// First index (in order) for which `f` returns `Some`.
pub fn find_map_first<R, F>(exec: Execution, len: usize, f: F) -> Option<R>
where
    R: Send,
    F: Fn(usize) -> Option<R> + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..len).into_par_iter().find_map_first(f)
        }
        _ => (0..len).find_map(f),
    }
}

/// Folds `0..len` split into contiguous chunks; chunk results merge with `merge`.
pub fn fold_chunks<A, F, M>(exec: Execution, len: u64, chunk: u64, fold: F, merge: M) -> Option<A>
where
    A: Send,
    F: Fn(std::ops::Range<u64>) -> A + Sync + Send,
    M: Fn(A, A) -> A + Sync + Send,
{
    let chunk = chunk.max(1);
    let chunks = len.div_ceil(chunk) as usize;
    let partials = map_indices(exec, chunks, |c| {
        let start = c as u64 * chunk;
        fold(start..(start + chunk).min(len))
    });
    partials.into_iter().reduce(merge)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let seq = map_indices(Execution::Sequential, 100, |i| i * i);
        let par = map_indices(Execution::Parallel, 100, |i| i * i);
        assert_eq!(seq, par);
        let f = |i: usize| (i % 7 == 6 && i > 20).then_some(i);
        assert_eq!(find_map_first(Execution::Sequential, 100, f), Some(27));
        assert_eq!(find_map_first(Execution::Parallel, 100, f), Some(27));
        let sum = |r: std::ops::Range<u64>| r.sum::<u64>();
        assert_eq!(
            fold_chunks(Execution::Parallel, 1000, 33, sum, |a, b| a + b),
            Some(499500)
        );
        assert_eq!(
            fold_chunks(Execution::Sequential, 0, 33, sum, |a, b| a + b),
            None
        );
    }
}
