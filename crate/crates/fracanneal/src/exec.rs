use fracanneal_core::ensemble::ReplicateMap;
use rayon::prelude::*;

/// Runs replicates on the current rayon pool. Results come back in replicate
/// order, so output does not depend on the thread count.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayon;

impl ReplicateMap for Rayon {
    fn map_replicates<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..count).into_par_iter().map(f).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fracanneal_core::ensemble::Sequential;

    #[test]
    fn matches_sequential_order() {
        let f = |i: usize| (i as f64).sqrt();
        assert_eq!(Rayon.map_replicates(1000, f), Sequential.map_replicates(1000, f));
    }
}
