//! Convergence diagnostics: Monte Carlo L² distances, power-law rate fits,
//! the Gronwall bound for the linearised system, and Hurst estimation.
//!
//! Norms are L²(Ω) norms (root mean square). Fields named `mean_sq` hold
//! squares; everything else is a norm.

mod gronwall;
mod hurst;
mod rate;
mod stats;

pub use gronwall::{
    gronwall_check, gronwall_from_ensembles, gronwall_ladder, m_paper, m_safe, GronwallConstants,
    GronwallReport,
};
pub use hurst::{hurst_estimate, hurst_estimate_values, MIN_HURST_STEPS};
pub use rate::{default_ladder, quadrature_rate_fit, rate_regression, LadderFit, RateReport};
pub use stats::{jackknife_se, mean_se, mean_var, ErrorMethod, Welford};

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fbm::{FbmPath, TimeGrid};
use crate::sde::StatePath;
use crate::steady::LinearSolutionPath;

/// A path that can take part in a coupled ensemble comparison.
pub trait EnsemblePath {
    fn grid(&self) -> &TimeGrid;
    /// State vector at node `n`.
    fn state(&self, n: usize) -> &[f64];
    /// Seed of the Wiener path the path was built from.
    fn source_seed(&self) -> u64;
}

impl EnsemblePath for FbmPath {
    fn grid(&self) -> &TimeGrid {
        &self.grid
    }
    fn state(&self, n: usize) -> &[f64] {
        core::slice::from_ref(&self.values[n])
    }
    fn source_seed(&self) -> u64 {
        self.source_seed
    }
}

impl EnsemblePath for StatePath {
    fn grid(&self) -> &TimeGrid {
        &self.grid
    }
    fn state(&self, n: usize) -> &[f64] {
        self.row(n)
    }
    fn source_seed(&self) -> u64 {
        self.source_seed
    }
}

impl EnsemblePath for LinearSolutionPath {
    fn grid(&self) -> &TimeGrid {
        &self.grid
    }
    fn state(&self, n: usize) -> &[f64] {
        self.row(n)
    }
    fn source_seed(&self) -> u64 {
        self.source_seed
    }
}

/// Monte Carlo estimate of `E|X_t − Y_t|²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2Estimate {
    pub t: f64,
    pub mean_sq: f64,
    pub std_error: f64,
    pub replicates: usize,
}

impl L2Estimate {
    /// Summarises per-replicate squared deviations.
    pub fn from_samples(t: f64, squared: &[f64], method: ErrorMethod) -> Result<Self> {
        if squared.len() < 2 {
            return Err(Error::invalid("replicates", "need at least two replicates"));
        }
        let (mean_sq, std_error) = mean_se(squared, method);
        Ok(Self {
            t,
            mean_sq,
            std_error,
            replicates: squared.len(),
        })
    }

    /// The L² norm `√mean_sq`.
    pub fn rms(&self) -> f64 {
        libm::sqrt(self.mean_sq)
    }
}

/// Coupled L² distance between two ensembles at grid time `t`.
///
/// Replicate `r` of `a` and of `b` must come from the same Wiener seed.
pub fn l2_distance<P: EnsemblePath, Q: EnsemblePath>(a: &[P], b: &[Q], t: f64) -> Result<L2Estimate> {
    l2_distance_with(a, b, t, ErrorMethod::Jackknife)
}

pub fn l2_distance_with<P: EnsemblePath, Q: EnsemblePath>(
    a: &[P],
    b: &[Q],
    t: f64,
    method: ErrorMethod,
) -> Result<L2Estimate> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let Some(first) = a.first() else {
        return Err(Error::invalid("replicates", "empty ensemble"));
    };
    let grid = *first.grid();
    let n = grid.index_of(t)?;
    let mut squared = Vec::with_capacity(a.len());
    for (r, (x, y)) in a.iter().zip(b).enumerate() {
        if x.grid() != &grid || y.grid() != &grid {
            return Err(Error::GridMismatch);
        }
        if x.source_seed() != y.source_seed() {
            return Err(Error::CouplingViolation { replicate: r });
        }
        let (sx, sy) = (x.state(n), y.state(n));
        if sx.len() != sy.len() {
            return Err(Error::DimensionMismatch {
                expected: sx.len(),
                found: sy.len(),
            });
        }
        squared.push(sx.iter().zip(sy).map(|(p, q)| (p - q) * (p - q)).sum());
    }
    L2Estimate::from_samples(grid.node(n), &squared, method)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::{fbm_from_wiener, sample_wiener, HurstParam};
    use alloc::vec;

    fn synthetic(seed: u64, shift: f64) -> FbmPath {
        // dyadic values so that shifts are exact
        let grid = TimeGrid::new(1.0, 4).unwrap();
        FbmPath {
            grid,
            hurst: HurstParam::new(0.5).unwrap(),
            epsilon: 0.0,
            values: (0..5).map(|i| (i as f64 + seed as f64) / 8.0 + shift).collect(),
            source_seed: seed,
        }
    }

    #[test]
    fn identical_ensembles() {
        let a: Vec<FbmPath> = (0..6).map(|s| synthetic(s, 0.0)).collect();
        let e = l2_distance(&a, &a, 0.5).unwrap();
        assert_eq!((e.mean_sq, e.std_error, e.replicates), (0.0, 0.0, 6));
    }

    #[test]
    fn constant_shift() {
        let a: Vec<FbmPath> = (0..6).map(|s| synthetic(s, 0.0)).collect();
        let b: Vec<FbmPath> = (0..6).map(|s| synthetic(s, 0.5)).collect();
        let e = l2_distance(&a, &b, 1.0).unwrap();
        assert_eq!(e.mean_sq, 0.25);
        assert_eq!(e.std_error, 0.0);
    }

    #[test]
    fn rejects_uncoupled_or_malformed() {
        let a: Vec<FbmPath> = (0..3).map(|s| synthetic(s, 0.0)).collect();
        let b: Vec<FbmPath> = (1..4).map(|s| synthetic(s, 0.0)).collect();
        assert_eq!(l2_distance(&a, &b, 0.5), Err(Error::CouplingViolation { replicate: 0 }));
        assert!(matches!(l2_distance(&a, &a, 0.3), Err(Error::OffGrid(_))));
        assert!(l2_distance(&a, &a[..2], 0.5).is_err());
        assert!(l2_distance(&a[..1], &a[..1], 0.5).is_err());
    }

    #[test]
    fn independent_pairing_inflates_distance() {
        let grid = TimeGrid::new(1.0, 64).unwrap();
        let h = HurstParam::new(0.7).unwrap();
        let ws: Vec<_> = (0..200).map(|r| sample_wiener(grid, 1, 1000 + r).unwrap()).collect();
        let exact: Vec<_> = ws.iter().map(|w| fbm_from_wiener(w, h, 0.0, 0).unwrap()).collect();
        let approx: Vec<_> = ws.iter().map(|w| fbm_from_wiener(w, h, 0.05, 0).unwrap()).collect();
        let coupled = l2_distance(&exact, &approx, 1.0).unwrap();
        // pair each exact path with the next replicate's approximation
        let mut shifted: Vec<_> = approx.clone();
        shifted.rotate_left(1);
        for (s, e) in shifted.iter_mut().zip(&exact) {
            s.source_seed = e.source_seed;
        }
        let independent = l2_distance(&exact, &shifted, 1.0).unwrap();
        assert!(independent.mean_sq > coupled.mean_sq);
        assert!(independent.mean_sq > 10.0 * coupled.mean_sq);
        let _ = vec![0];
    }
}
