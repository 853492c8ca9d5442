//! Thin wrappers around rayon so the crate builds with or without the
//! `parallel` feature. Every helper preserves output order, so results are
//! identical whichever path runs.

#[cfg(feature = "parallel")]
pub fn map_collect<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    T: Send,
    U: Send,
    F: Fn(T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, U, F>(items: Vec<T>, f: F) -> Vec<U>
where
    F: Fn(T) -> U,
{
    items.into_iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn for_each_row<F>(rows: &mut [f64], cols: usize, f: F)
where
    F: Fn(usize, &mut [f64]) + Sync + Send,
{
    use rayon::prelude::*;
    rows.par_chunks_mut(cols)
        .enumerate()
        .for_each(|(i, row)| f(i, row));
}

#[cfg(not(feature = "parallel"))]
pub fn for_each_row<F>(rows: &mut [f64], cols: usize, f: F)
where
    F: Fn(usize, &mut [f64]),
{
    for (i, row) in rows.chunks_mut(cols).enumerate() {
        f(i, row);
    }
}

/// Run `f` inside a pool of `threads` workers (0 = library default). Without
/// the `parallel` feature the closure just runs on the current thread.
#[cfg(feature = "parallel")]
pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    if threads == 0 {
        return f();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("failed to build thread pool");
    pool.install(f)
}

#[cfg(not(feature = "parallel"))]
pub fn with_threads<R>(_threads: usize, f: impl FnOnce() -> R) -> R {
    f()
}
