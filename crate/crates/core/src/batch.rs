//! Batch evaluation over independent problems.
//!
//! With the `parallel` feature the items are spread over the rayon thread
//! pool; without it, or through [`map_sequential`], they run in order on
//! the calling thread. Results keep the input order either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_sequential(items, f)
    }
}

pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

/// Whether [`map`] runs on several threads.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
