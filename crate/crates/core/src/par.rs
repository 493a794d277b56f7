//! Execution policy for the per-node kernels.

use serde::{Deserialize, Serialize};

/// Whether per-node loops run on the rayon pool or on the calling thread.
///
/// Reductions are always summed sequentially so results do not depend on
/// the policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

#[cfg(feature = "parallel")]
const MIN_LEN: usize = 256;

/// `(0..n).map(f).collect()` under the given policy.
pub fn map_range<T, F>(exec: Exec, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().with_min_len(MIN_LEN).map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Maps each item of a slice under the given policy.
pub fn map_slice<I, T, F>(exec: Exec, items: &[I], f: F) -> Vec<T>
where
    I: Sync,
    T: Send,
    F: Fn(&I) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policies_agree() {
        let f = |i: usize| (i as f64).sqrt().sin();
        let a = map_range(Exec::Sequential, 10_000, f);
        let b = map_range(Exec::Parallel, 10_000, f);
        assert_eq!(a, b);
        let c = map_slice(Exec::Parallel, &a, |x| x * 2.0);
        assert_eq!(c.len(), a.len());
    }
}
