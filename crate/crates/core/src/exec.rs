//! Execution mode for the data-parallel loops.
//!
//! With the `parallel` feature, independent per-face / per-hyperplane /
//! per-system work runs on the rayon pool unless the mode is switched to
//! [`Execution::Sequential`]. Without the feature everything is sequential.
//! Results are always returned in input order.

use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

static MODE: AtomicU8 = AtomicU8::new(1);

pub fn set_execution(mode: Execution) {
    MODE.store(if mode == Execution::Parallel { 1 } else { 0 }, Ordering::Relaxed);
}

pub fn execution() -> Execution {
    if cfg!(feature = "parallel") && MODE.load(Ordering::Relaxed) == 1 {
        Execution::Parallel
    } else {
        Execution::Sequential
    }
}

/// Map in input order, in parallel when enabled.
pub fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if execution() == Execution::Parallel && items.len() > 1 {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
    }
    items.iter().map(f).collect()
}

/// Like [`par_map`] but stops at the first `Err` (in input order).
pub fn par_try_map<T, R, E, F>(items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    par_map(items, f).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved() {
        let v: Vec<u64> = (0..200).collect();
        let out = par_map(&v, |x| x * x);
        assert_eq!(out, v.iter().map(|x| x * x).collect::<Vec<_>>());
    }
}
