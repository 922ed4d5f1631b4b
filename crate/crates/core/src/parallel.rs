//! Data-parallel map with a sequential fallback.
//!
//! With the `parallel` feature (default) batches run on the rayon pool;
//! without it the same call compiles to a plain iterator chain. Output
//! order always matches input order, so reductions over the results are
//! deterministic either way.

#[cfg(feature = "parallel")]
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
