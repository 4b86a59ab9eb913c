//! Data-parallel helpers for verification sweeps.
//!
//! With the `parallel` feature (default) sweeps over sample points and
//! parameter draws run on the rayon pool; without it every sweep runs
//! sequentially. [`Execution::Sequential`] forces the sequential path even
//! when the feature is on, which is what the benches compare against.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// Whether this build can actually run in parallel.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Maps `f` over `0..count` and collects in index order.
pub fn map_indexed<T, F>(exec: Execution, count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        return (0..count).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..count).map(f).collect()
}

/// Maps a fallible `f` over `0..count`; the first error in index order wins.
pub fn try_map_indexed<T, E, F>(exec: Execution, count: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    map_indexed(exec, count, f).into_iter().collect()
}

/// Fallible max-reduction over `0..count`.
pub fn try_max<E, F>(exec: Execution, count: usize, f: F) -> Result<f64, E>
where
    E: Send,
    F: Fn(usize) -> Result<f64, E> + Sync + Send,
{
    Ok(try_map_indexed(exec, count, f)?
        .into_iter()
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_paths_agree() {
        let f = |i: usize| ((i * 37) % 101) as f64;
        let a: Result<f64, ()> = try_max(Execution::Sequential, 500, |i| Ok(f(i)));
        let b: Result<f64, ()> = try_max(Execution::Parallel, 500, |i| Ok(f(i)));
        assert_eq!(a, b);
        assert_eq!(
            map_indexed(Execution::Parallel, 10, |i| i * i),
            map_indexed(Execution::Sequential, 10, |i| i * i)
        );
    }

    #[test]
    fn first_error_wins() {
        let r: Result<Vec<usize>, usize> = try_map_indexed(Execution::Parallel, 20, |i| {
            if i % 7 == 3 {
                Err(i)
            } else {
                Ok(i)
            }
        });
        assert_eq!(r, Err(3));
    }
}
