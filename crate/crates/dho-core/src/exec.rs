//! Execution helpers for the data-parallel inner loops.
//!
//! With the default `parallel` feature these fan out over rayon; compiled
//! with `--no-default-features` everything runs sequentially. The `_seq`
//! variants are always available so the benches can compare both paths in
//! a single build.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

pub fn map_range<U: Send>(n: usize, f: impl Fn(usize) -> U + Sync + Send) -> Vec<U> {
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

pub fn map_range_seq<U>(n: usize, f: impl Fn(usize) -> U) -> Vec<U> {
    (0..n).map(f).collect()
}

/// Least-index violation over `0..n`; the scan is parallel but the merge is
/// deterministic, so reports do not depend on thread scheduling.
pub fn first_violation(n: usize, f: impl Fn(usize) -> Option<String> + Sync + Send) -> Option<(usize, String)> {
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().filter_map(|i| f(i).map(|m| (i, m))).min_by_key(|x| x.0)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).filter_map(|i| f(i).map(|m| (i, m))).next()
    }
}

pub fn first_violation_seq(n: usize, f: impl Fn(usize) -> Option<String>) -> Option<(usize, String)> {
    (0..n).filter_map(|i| f(i).map(|m| (i, m))).next()
}
