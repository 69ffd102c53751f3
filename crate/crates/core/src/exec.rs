//! Data-parallel helpers with a sequential fallback.
//!
//! Batch work (verification suites, random trials, per-degree audit rows)
//! goes through [`par_map`]. Without the `parallel` feature every mode runs
//! sequentially, so results never depend on the mode.

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExecutionMode {
    Parallel,
    Sequential,
}

impl Default for ExecutionMode {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            ExecutionMode::Parallel
        } else {
            ExecutionMode::Sequential
        }
    }
}

impl ExecutionMode {
    /// The mode that will actually run, given the compiled features.
    pub fn effective(self) -> Self {
        if cfg!(feature = "parallel") {
            self
        } else {
            ExecutionMode::Sequential
        }
    }
}

/// Order-preserving map over a slice.
pub fn par_map<T, R, F>(mode: ExecutionMode, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match mode.effective() {
        #[cfg(feature = "parallel")]
        ExecutionMode::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}
