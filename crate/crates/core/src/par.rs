//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (default) the helpers fan out on the global
//! rayon pool; without it they compile to plain loops. A runtime override
//! ([`set_sequential`]) forces the sequential path even in parallel builds,
//! which is what the benchmark suite uses to compare both modes in one
//! process.
//!
//! Every helper collects results in input order and keeps per-item work
//! independent, so outputs are bit-identical across thread counts.

use std::sync::atomic::{AtomicBool, Ordering};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

static FORCE_SEQUENTIAL: AtomicBool = AtomicBool::new(false);

/// Forces sequential execution at runtime (no-op in non-parallel builds).
pub fn set_sequential(force: bool) {
    FORCE_SEQUENTIAL.store(force, Ordering::Relaxed);
}

/// True when the parallel feature is compiled in and not overridden.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel") && !FORCE_SEQUENTIAL.load(Ordering::Relaxed)
}

/// Bounds the worker count from the `IPP_FLEET_THREADS` environment variable.
///
/// Call once at process start; later calls (or an already-built pool) are
/// ignored. Unset, empty or unparsable values leave the default pool size.
pub fn init_threads_from_env() {
    #[cfg(feature = "parallel")]
    {
        if let Ok(v) = std::env::var("IPP_FLEET_THREADS") {
            if let Ok(n) = v.trim().parse::<usize>() {
                if n >= 1 {
                    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
                }
            }
        }
    }
}

/// Maps `f` over `0..n`, collecting results in index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Maps `f` over a slice, collecting results in order.
pub fn map_slice<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if is_parallel() {
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sequential_override_matches_parallel() {
        let par = map_indexed(1000, |i| (i as f64).sqrt());
        set_sequential(true);
        let seq = map_indexed(1000, |i| (i as f64).sqrt());
        set_sequential(false);
        assert_eq!(par, seq);
    }
}
