//! Liouville fractional Brownian motion and its ε-regularisation.
//!
//! All paths are built from a shared [`WienerPath`] by the left-endpoint
//! (Itô) discretisation of
//!
//! ```text
//! B_t = ∫_0^t (t − s + ε)^α dW_s,   α = H − 1/2,
//! ```
//!
//! i.e. `B_{t_n} = Σ_{i<n} k((n − i)Δ) ΔW_i` with `k(u) = (u + ε)^α`. The
//! smallest lag is `Δ`, so the kernel stays finite for `ε = 0, α < 0`.
//! `ε = 0` means the exact Liouville process.

mod covariance;

pub use covariance::{
    discrete_covariance, discrete_eps_diff_variance, eps_diff_variance,
    eps_diff_variance_with_tolerance, liouville_covariance, liouville_covariance_with_tolerance,
    mandelbrot_covariance, COVARIANCE_TOLERANCE, EPS_DIFF_TOLERANCE,
};

use alloc::vec;
use alloc::vec::Vec;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng;

/// Hurst exponent `H ∈ (0, 1)` together with `α = H − 1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HurstParam {
    h: f64,
    alpha: f64,
}

impl HurstParam {
    pub fn new(h: f64) -> Result<Self> {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::InvalidHurst(h));
        }
        Ok(Self { h, alpha: h - 0.5 })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// True when the kernel is identically one (standard Brownian motion).
    pub fn is_brownian(&self) -> bool {
        self.alpha == 0.0
    }
}

/// Uniform grid `0 = t_0 < … < t_N = t_end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    t_end: f64,
    n_steps: usize,
}

impl TimeGrid {
    pub fn new(t_end: f64, n_steps: usize) -> Result<Self> {
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::InvalidGrid(alloc::format!("t_end must be positive, got {t_end}")));
        }
        if n_steps == 0 {
            return Err(Error::InvalidGrid("grid needs at least one step".into()));
        }
        Ok(Self { t_end, n_steps })
    }

    pub fn t_end(&self) -> f64 {
        self.t_end
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn dt(&self) -> f64 {
        self.t_end / self.n_steps as f64
    }

    /// `t_i`; exact at both ends.
    pub fn node(&self, i: usize) -> f64 {
        debug_assert!(i <= self.n_steps);
        self.t_end * i as f64 / self.n_steps as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|i| self.node(i)).collect()
    }

    /// Index of the node at `t`, accepting round-off of a few ulps.
    pub fn index_of(&self, t: f64) -> Result<usize> {
        let x = t / self.dt();
        let i = libm::round(x);
        if !(0.0..=self.n_steps as f64).contains(&i) || (x - i).abs() > 1e-9 * x.abs().max(1.0) {
            return Err(Error::OffGrid(t));
        }
        Ok(i as usize)
    }

    /// The grid with every step halved.
    pub fn refined(&self) -> Self {
        Self {
            t_end: self.t_end,
            n_steps: 2 * self.n_steps,
        }
    }
}

/// Independent standard Brownian increments, one column per dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerPath {
    grid: TimeGrid,
    dims: usize,
    // column-major: increments[dim * n_steps + step]
    increments: Vec<f64>,
    seed: u64,
    refinement: u32,
}

/// Draws `dims` independent Wiener increment columns on `grid`.
///
/// Column `j` comes from stream `j` of the generator keyed by `seed`, so it
/// does not depend on how many other columns are drawn.
pub fn sample_wiener(grid: TimeGrid, dims: usize, seed: u64) -> Result<WienerPath> {
    if dims == 0 {
        return Err(Error::invalid("dims", "at least one dimension is required"));
    }
    let n = grid.n_steps();
    let sd = libm::sqrt(grid.dt());
    let mut increments = Vec::with_capacity(dims * n);
    for j in 0..dims {
        let mut rng = rng::stream(seed, rng::stream_id(j, 0));
        increments.extend((0..n).map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            sd * z
        }));
    }
    Ok(WienerPath {
        grid,
        dims,
        increments,
        seed,
        refinement: 0,
    })
}

impl WienerPath {
    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of Brownian-bridge refinements applied since sampling.
    pub fn refinement(&self) -> u32 {
        self.refinement
    }

    /// `ΔW` column for dimension `dim`.
    pub fn increments(&self, dim: usize) -> Result<&[f64]> {
        if dim >= self.dims {
            return Err(Error::invalid(
                "dim_index",
                alloc::format!("dimension {dim} out of range for a {}-dimensional path", self.dims),
            ));
        }
        let n = self.grid.n_steps();
        Ok(&self.increments[dim * n..(dim + 1) * n])
    }

    pub fn increment(&self, step: usize, dim: usize) -> f64 {
        self.increments[dim * self.grid.n_steps() + step]
    }

    /// Running sum `W_{t_n}` for dimension `dim`.
    pub fn cumulative(&self, dim: usize) -> Result<Vec<f64>> {
        let dw = self.increments(dim)?;
        let mut out = Vec::with_capacity(dw.len() + 1);
        let mut acc = 0.0;
        out.push(acc);
        for &d in dw {
            acc += d;
            out.push(acc);
        }
        Ok(out)
    }

    /// Halves every step by Brownian-bridge interpolation.
    ///
    /// Each increment `ΔW` over a step of length `Δ` is split into
    /// `ΔW/2 + Z √Δ / 2` and the remainder, so the coarse path is preserved
    /// (to rounding) and the fine path is again a Wiener path.
    pub fn refine(&self) -> WienerPath {
        let n = self.grid.n_steps();
        let level = self.refinement + 1;
        let half_sd = 0.5 * libm::sqrt(self.grid.dt());
        let mut increments = Vec::with_capacity(2 * self.increments.len());
        for j in 0..self.dims {
            let mut rng = rng::stream(self.seed, rng::stream_id(j, level));
            for &d in &self.increments[j * n..(j + 1) * n] {
                let z: f64 = StandardNormal.sample(&mut rng);
                let first = 0.5 * d + half_sd * z;
                increments.push(first);
                increments.push(d - first);
            }
        }
        WienerPath {
            grid: self.grid.refined(),
            dims: self.dims,
            increments,
            seed: self.seed,
            refinement: level,
        }
    }

    /// Applies [`refine`](Self::refine) `levels` times.
    pub fn refine_by(&self, levels: u32) -> WienerPath {
        let mut w = self.clone();
        for _ in 0..levels {
            w = w.refine();
        }
        w
    }
}

/// Values of `B^H` or `B^{H,ε}` at every grid node.
#[derive(Debug, Clone, PartialEq)]
pub struct FbmPath {
    pub grid: TimeGrid,
    pub hurst: HurstParam,
    pub epsilon: f64,
    pub values: Vec<f64>,
    pub source_seed: u64,
}

impl FbmPath {
    /// `B_{t_{n+1}} − B_{t_n}`.
    pub fn increment(&self, n: usize) -> f64 {
        self.values[n + 1] - self.values[n]
    }
}

/// The auxiliary process `φ^ε_t = ∫_0^t (t − s + ε)^{α−1} dW_s` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhiPath {
    pub grid: TimeGrid,
    pub hurst: HurstParam,
    pub epsilon: f64,
    pub values: Vec<f64>,
    pub source_seed: u64,
}

fn check_epsilon(epsilon: f64, strict: bool) -> Result<()> {
    let ok = if strict { epsilon > 0.0 } else { epsilon >= 0.0 };
    if !ok || !epsilon.is_finite() {
        let bound = if strict { "positive" } else { "nonnegative" };
        return Err(Error::invalid(
            "epsilon",
            alloc::format!("must be {bound} and finite, got {epsilon}"),
        ));
    }
    Ok(())
}

/// `table[m − 1] = (mΔ + ε)^exponent` for lags `m = 1..=N`.
pub fn kernel_table(grid: &TimeGrid, exponent: f64, epsilon: f64) -> Vec<f64> {
    let dt = grid.dt();
    (1..=grid.n_steps())
        .map(|m| libm::pow(m as f64 * dt + epsilon, exponent))
        .collect()
}

/// `Σ_{i<n} table[n − 1 − i] · dw[i]`, summed in increasing `i`.
#[inline]
fn convolve_at(dw: &[f64], table: &[f64], n: usize) -> f64 {
    dw[..n]
        .iter()
        .zip(table[..n].iter().rev())
        .fold(0.0, |acc, (d, k)| acc + k * d)
}

fn convolve(dw: &[f64], table: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; dw.len() + 1];
    for n in 1..=dw.len() {
        out[n] = convolve_at(dw, table, n);
    }
    out
}

/// Builds `B^{H,ε}` (or `B^H` for `ε = 0`) along dimension `dim_index` of `w`.
pub fn fbm_from_wiener(
    w: &WienerPath,
    hurst: HurstParam,
    epsilon: f64,
    dim_index: usize,
) -> Result<FbmPath> {
    check_epsilon(epsilon, false)?;
    let values = if hurst.is_brownian() {
        // kernel ≡ 1: the convolution is the running sum, bit for bit
        w.cumulative(dim_index)?
    } else {
        let dw = w.increments(dim_index)?;
        convolve(dw, &kernel_table(w.grid(), hurst.alpha(), epsilon))
    };
    Ok(FbmPath {
        grid: *w.grid(),
        hurst,
        epsilon,
        values,
        source_seed: w.seed(),
    })
}

/// Values of the same process as [`fbm_from_wiener`] at selected node
/// indices only; each value is bit-identical to the full-path one.
pub fn fbm_values_at(
    w: &WienerPath,
    hurst: HurstParam,
    epsilon: f64,
    dim_index: usize,
    nodes: &[usize],
) -> Result<Vec<f64>> {
    check_epsilon(epsilon, false)?;
    let dw = w.increments(dim_index)?;
    if let Some(&bad) = nodes.iter().find(|&&n| n > dw.len()) {
        return Err(Error::invalid(
            "nodes",
            alloc::format!("node {bad} beyond the last grid index {}", dw.len()),
        ));
    }
    if hurst.is_brownian() {
        return Ok(nodes
            .iter()
            .map(|&n| dw[..n].iter().fold(0.0, |acc, d| acc + d))
            .collect());
    }
    let table = kernel_table(w.grid(), hurst.alpha(), epsilon);
    Ok(nodes.iter().map(|&n| convolve_at(dw, &table, n)).collect())
}

/// `φ^ε` along dimension `dim_index` of `w`; requires `ε > 0`.
pub fn phi_eps(w: &WienerPath, hurst: HurstParam, epsilon: f64, dim_index: usize) -> Result<PhiPath> {
    check_epsilon(epsilon, true)?;
    let dw = w.increments(dim_index)?;
    let table = kernel_table(w.grid(), hurst.alpha() - 1.0, epsilon);
    Ok(PhiPath {
        grid: *w.grid(),
        hurst,
        epsilon,
        values: convolve(dw, &table),
        source_seed: w.seed(),
    })
}

/// Largest gap between the increments of `B^{H,ε}` and the semimartingale
/// form `α φ^ε_{t_n} Δ + ε^α ΔW_n` along one path.
pub fn decomposition_residual(
    w: &WienerPath,
    hurst: HurstParam,
    epsilon: f64,
    dim_index: usize,
) -> Result<f64> {
    let b = fbm_from_wiener(w, hurst, epsilon, dim_index)?;
    let phi = phi_eps(w, hurst, epsilon, dim_index)?;
    let dw = w.increments(dim_index)?;
    let dt = w.grid().dt();
    let alpha = hurst.alpha();
    let eps_pow = libm::pow(epsilon, alpha);
    Ok((0..dw.len())
        .map(|n| (b.increment(n) - (alpha * phi.values[n] * dt + eps_pow * dw[n])).abs())
        .fold(0.0, f64::max))
}
