// SPDX-License-Identifier: Apache-2.0

//! Sequential / data-parallel dispatch for the sweep-style workloads
//! (Monte-Carlo experiments, grid searches, figure curves).
//!
//! With the `parallel` feature disabled, [`Execution::Parallel`] silently runs
//! sequentially. Output ordering is identical in both modes.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
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

impl Execution {
    /// Maps `f` over `0..len`, returning results in index order.
    pub fn map_indexed<T, F>(self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..len).into_par_iter().map(f).collect()
            }
            _ => (0..len).map(f).collect(),
        }
    }

    /// Sizes the global worker pool. Only the first call has an effect, and
    /// it is a no-op without the `parallel` feature.
    pub fn init_threads(threads: usize) -> crate::Result<()> {
        if threads == 0 {
            return Err(crate::Error::InvalidArgument("thread count must be >= 1".into()));
        }
        #[cfg(feature = "parallel")]
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| crate::Error::InvalidArgument(e.to_string()))?;
        Ok(())
    }

    /// Maps `f` over a slice, returning results in input order.
    pub fn map_slice<S, T, F>(self, items: &[S], f: F) -> Vec<T>
    where
        S: Sync,
        T: Send,
        F: Fn(&S) -> T + Sync + Send,
    {
        self.map_indexed(items.len(), |i| f(&items[i]))
    }
}
