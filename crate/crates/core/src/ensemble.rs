//! Replicate ensembles and the executor abstraction used to evaluate them.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fbm::{sample_wiener, TimeGrid, WienerPath};
use crate::rng::derive_seed;

/// Maps a function over replicate indices, returning results in index order.
///
/// Implementations may run replicates concurrently, but every reduction in
/// this crate consumes the returned `Vec` sequentially, so results do not
/// depend on scheduling.
pub trait ReplicateMap {
    fn map_replicates<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send;
}

/// Runs replicates one after another on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl ReplicateMap for Sequential {
    fn map_replicates<T, F>(&self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        (0..count).map(f).collect()
    }
}

/// A lazily generated family of independent Wiener paths.
///
/// Replicate `r` is [`sample_wiener`]`(grid, dims, derive_seed(master_seed, r))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WienerEnsemble {
    pub grid: TimeGrid,
    pub dims: usize,
    pub master_seed: u64,
    pub replicates: usize,
}

impl WienerEnsemble {
    pub fn new(grid: TimeGrid, dims: usize, master_seed: u64, replicates: usize) -> Result<Self> {
        if dims == 0 {
            return Err(Error::invalid("dims", "at least one dimension is required"));
        }
        if replicates == 0 {
            return Err(Error::invalid("replicates", "at least one replicate is required"));
        }
        Ok(Self {
            grid,
            dims,
            master_seed,
            replicates,
        })
    }

    pub fn seed(&self, replicate: usize) -> u64 {
        derive_seed(self.master_seed, replicate as u64)
    }

    pub fn path(&self, replicate: usize) -> WienerPath {
        sample_wiener(self.grid, self.dims, self.seed(replicate))
            .expect("ensemble dimensions validated at construction")
    }
}
