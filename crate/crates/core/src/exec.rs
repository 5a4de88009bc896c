//! Run-level parallelism.
//!
//! With the `parallel` feature (on by default) independent runs are spread
//! over the rayon pool. Without it, or with [`Execution::Sequential`], they
//! run in index order on the calling thread. Results are always returned in
//! run-index order, so downstream reductions see the same sequence either way.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Rayon's global pool. Falls back to sequential without the `parallel` feature.
    #[default]
    Parallel,
}

impl Execution {
    /// Maps `f` over `0..n`, preserving index order.
    pub fn map_runs<T, F>(self, n: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match self {
            Execution::Sequential => (0..n).map(f).collect(),
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..n).into_par_iter().map(f).collect(),
            #[cfg(not(feature = "parallel"))]
            Execution::Parallel => (0..n).map(f).collect(),
        }
    }

    /// Runs `f` with a dedicated pool of `threads` workers.
    #[cfg(feature = "parallel")]
    pub fn with_threads<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("failed to build thread pool")
            .install(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_preserved() {
        let seq = Execution::Sequential.map_runs(1000, |i| i * i);
        let par = Execution::Parallel.map_runs(1000, |i| i * i);
        assert_eq!(seq, par);
        assert_eq!(seq[999], 999 * 999);
    }
}
