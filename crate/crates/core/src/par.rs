//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) these dispatch to rayon; without it
//! they run on the calling thread. Results are always returned in input
//! order, so output never depends on scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Execution strategy for the ensemble-level entry points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether work will actually be spread across threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

pub fn map_range<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_range_with(Execution::Parallel, n, f)
}

pub fn map_range_with<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

pub fn map_slice_with<S, T, F>(exec: Execution, items: &[S], f: F) -> Vec<T>
where
    S: Sync,
    T: Send,
    F: Fn(&S) -> T + Sync + Send,
{
    map_range_with(exec, items.len(), |i| f(&items[i]))
}

/// Applies `f` to each `width`-sized chunk, concatenating what it pushes.
pub fn flat_map_chunks<T, F>(flat: &[u32], width: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&[u32], &mut Vec<T>) + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if flat.len() >= 4096 * width {
        let parts: Vec<Vec<T>> = flat
            .par_chunks(1024 * width)
            .map(|block| {
                let mut out = Vec::new();
                for chunk in block.chunks(width) {
                    f(chunk, &mut out);
                }
                out
            })
            .collect();
        return parts.into_iter().flatten().collect();
    }
    let mut out = Vec::new();
    for chunk in flat.chunks(width) {
        f(chunk, &mut out);
    }
    out
}
