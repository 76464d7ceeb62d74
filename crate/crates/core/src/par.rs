//! Data-parallel helpers with a sequential fallback.
//!
//! With the `parallel` feature (on by default) the batch entry points fan
//! out over rayon's global pool. Without it, or when a caller explicitly
//! asks for [`Execution::Sequential`], the same closures run in a plain
//! iterator. Results are always collected in input order, so output never
//! depends on scheduling.

/// How a batch operation should run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential when built without the `parallel` feature.
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
    /// True when this build can actually run work on more than one thread.
    pub fn is_parallel(self) -> bool {
        matches!(self, Execution::Parallel) && cfg!(feature = "parallel")
    }
}

/// Map `f` over `items`, preserving order.
pub fn map<T, U, F>(exec: Execution, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if exec.is_parallel() {
            use rayon::prelude::*;
            return items.par_iter().map(f).collect();
        }
    }
    let _ = exec;
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_is_preserved_in_both_modes() {
        let xs: Vec<u64> = (0..10_000).collect();
        let seq = map(Execution::Sequential, &xs, |x| x * 3 + 1);
        let par = map(Execution::Parallel, &xs, |x| x * 3 + 1);
        assert_eq!(seq, par);
        assert_eq!(seq[9_999], 29_998);
    }

    #[test]
    fn default_follows_feature() {
        assert_eq!(Execution::default().is_parallel(), cfg!(feature = "parallel"));
        assert!(!Execution::Sequential.is_parallel());
    }
}
