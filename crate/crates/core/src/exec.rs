//! Data-parallel execution of independent trials.
//!
//! Batch evaluations (Monte Carlo trials, exhaustive enumerations) are maps
//! over an index range followed by a commutative merge, so parallel and
//! sequential execution produce bit-identical results. With the `parallel`
//! feature the work runs on rayon; without it everything falls back to a
//! plain iterator. Both paths stay callable when the feature is on so they
//! can be benchmarked against each other.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// How to drive a batch of independent evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

impl ExecMode {
    /// Parallel when compiled in, sequential otherwise.
    pub fn auto() -> Self {
        #[cfg(feature = "parallel")]
        {
            ExecMode::Parallel
        }
        #[cfg(not(feature = "parallel"))]
        {
            ExecMode::Sequential
        }
    }
}

impl Default for ExecMode {
    fn default() -> Self {
        ExecMode::auto()
    }
}

/// Map an index range and merge with a commutative, associative fold.
pub fn map_reduce<T, Map, Fold>(count: u64, mode: ExecMode, map: Map, identity: T, fold: Fold) -> T
where
    T: Send + Sync + Clone,
    Map: Fn(u64) -> T + Send + Sync,
    Fold: Fn(T, T) -> T + Send + Sync,
{
    match mode {
        ExecMode::Sequential => (0..count).map(map).fold(identity, fold),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => (0..count)
            .into_par_iter()
            .map(map)
            .reduce(|| identity.clone(), fold),
    }
}

/// Map an index range into a vector, preserving index order.
pub fn map_collect<T, Map>(count: u64, mode: ExecMode, map: Map) -> Vec<T>
where
    T: Send,
    Map: Fn(u64) -> T + Send + Sync,
{
    match mode {
        ExecMode::Sequential => (0..count).map(map).collect(),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => (0..count).into_par_iter().map(map).collect(),
    }
}
