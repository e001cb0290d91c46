//! Ensemble execution.
//!
//! Paths are pure functions of their index, so an ensemble is a map over
//! `0..n`. Results are always collected in index order before any
//! reduction; running sequentially or in parallel therefore produces
//! byte-identical statistics.

use alloc::vec::Vec;

/// Map `f` over path indices `0..n`, in parallel when the `parallel`
/// feature is enabled.
#[cfg(feature = "parallel")]
pub fn run_paths<T: Send, F: Fn(u64) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n as u64).into_par_iter().map(f).collect()
}

/// Map `f` over path indices `0..n` sequentially.
#[cfg(not(feature = "parallel"))]
pub fn run_paths<T: Send, F: Fn(u64) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    (0..n as u64).map(f).collect()
}
