//! Batch helpers that run in parallel when the `parallel` feature is on.

#[cfg(feature = "parallel")]
pub fn map_range<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_range<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

pub fn map_slice<A: Sync, T: Send, F: Fn(&A) -> T + Sync + Send>(items: &[A], f: F) -> Vec<T> {
    map_range(items.len(), |i| f(&items[i]))
}
