//! Block-parallel execution with a sequential fallback.
//!
//! Work is cut into fixed-size blocks independent of the worker count. Each
//! block yields a partial result, and the partials are merged by a fixed
//! pairwise tree in block order, so results are bit-identical whether the
//! blocks ran on one thread or many.

use crate::error::{Error, Result};

/// Environment variable that overrides the worker count.
pub const WORKERS_ENV: &str = "THZ_LINK_WORKERS";

/// Trials per work block.
pub const BLOCK_TRIALS: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    /// Run every block on the calling thread.
    Sequential,
    /// Run blocks on the global rayon pool, or on a dedicated pool when the
    /// worker count is given.
    #[default]
    Parallel,
    ParallelWith(usize),
}

impl Execution {
    /// Reads [`WORKERS_ENV`]; falls back to [`Execution::Parallel`].
    pub fn from_env() -> Result<Self> {
        match std::env::var(WORKERS_ENV) {
            Ok(v) => {
                let n: usize = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::arg("workers", format!("{WORKERS_ENV}={v:?} is not a positive integer")))?;
                if n == 0 {
                    return Err(Error::arg("workers", format!("{WORKERS_ENV} must be at least 1")));
                }
                Ok(if n == 1 {
                    Execution::Sequential
                } else {
                    Execution::ParallelWith(n)
                })
            }
            Err(_) => Ok(Execution::default()),
        }
    }

    /// Maps `block` over `0..n_blocks` and merges the partials pairwise.
    pub fn map_reduce<T, F, M>(&self, n_blocks: u64, block: F, merge: M) -> Result<Option<T>>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
        M: Fn(T, T) -> T + Sync,
    {
        let parts = self.map_blocks(n_blocks, block)?;
        Ok(pairwise(parts, &merge))
    }

    pub fn map_blocks<T, F>(&self, n_blocks: u64, block: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match *self {
            Execution::Sequential => Ok((0..n_blocks).map(block).collect()),
            #[cfg(feature = "parallel")]
            Execution::Parallel => Ok(par_map(n_blocks, &block)),
            #[cfg(feature = "parallel")]
            Execution::ParallelWith(n) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build()
                    .map_err(|e| Error::Pool(e.to_string()))?;
                Ok(pool.install(|| par_map(n_blocks, &block)))
            }
            #[cfg(not(feature = "parallel"))]
            Execution::Parallel | Execution::ParallelWith(_) => Ok((0..n_blocks).map(block).collect()),
        }
    }
}

#[cfg(feature = "parallel")]
fn par_map<T: Send, F: Fn(u64) -> T + Sync + Send>(n_blocks: u64, block: &F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n_blocks).into_par_iter().map(block).collect()
}

/// Merges adjacent pairs until one value remains. Order is fixed by position.
pub fn pairwise<T, M: Fn(T, T) -> T>(mut parts: Vec<T>, merge: &M) -> Option<T> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(merge(a, b)),
                None => next.push(a),
            }
        }
        parts = next;
    }
    parts.pop()
}

/// Pairwise floating-point sum.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let (a, b) = values.split_at(values.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// Number of blocks covering `n` trials.
pub(crate) fn block_count(n: u64) -> u64 {
    n.div_ceil(BLOCK_TRIALS)
}

/// Trial index range of block `b` for a run of `n` trials.
pub(crate) fn block_range(b: u64, n: u64) -> std::ops::Range<u64> {
    let lo = b * BLOCK_TRIALS;
    lo..(lo + BLOCK_TRIALS).min(n)
}
