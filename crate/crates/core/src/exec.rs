//! Replication scheduling.
//!
//! Every replication is a pure function of its index, so results are
//! collected in index order and reduced on the calling thread. The schedule
//! therefore never changes a result, only how long it takes.

/// How replications are executed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// On the calling thread.
    Sequential,
    /// Across the current rayon pool. Falls back to sequential when the
    /// crate is built without the `parallel` feature.
    #[default]
    Parallel,
}

impl Execution {
    /// Evaluate `f(0..n)` and return the outputs in index order.
    pub fn map_indexed<T, F>(self, n: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..n).map(f).collect(),
            Execution::Parallel => parallel_map(n, f),
        }
    }
}

#[cfg(feature = "parallel")]
fn parallel_map<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_map<T, F>(n: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Run `job` on a dedicated pool of `threads` workers (0 means all cores).
#[cfg(feature = "parallel")]
pub fn with_threads<R, J>(threads: usize, job: J) -> R
where
    R: Send,
    J: FnOnce() -> R + Send,
{
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(job),
        Err(_) => job(),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn with_threads<R, J>(_threads: usize, job: J) -> R
where
    R: Send,
    J: FnOnce() -> R + Send,
{
    job()
}
