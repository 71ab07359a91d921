use alloc::vec::Vec;

use super::rate::rate_regression;
use crate::error::{Error, Result};
use crate::fbm::FbmPath;

/// Shortest path, in steps, the estimator accepts.
pub const MIN_HURST_STEPS: usize = 256;

/// Smallest number of blocks used at the coarsest scale.
const MIN_BLOCKS: usize = 16;

/// Aggregated-variance estimate of the Hurst exponent of `path`.
pub fn hurst_estimate(path: &FbmPath) -> Result<f64> {
    hurst_estimate_values(&path.values)
}

/// Estimates `H` from node values `v_0, …, v_N` on a uniform grid.
///
/// For dyadic block sizes `m` with at least 16 blocks, the mean square of the
/// non-overlapping increments `v_{(k+1)m} − v_{km}` scales as `m^{2H}`; the
/// estimate is half the log-log slope. A smooth path saturates at 1.
pub fn hurst_estimate_values(values: &[f64]) -> Result<f64> {
    let n = values.len().saturating_sub(1);
    if n < MIN_HURST_STEPS {
        return Err(Error::invalid(
            "path",
            alloc::format!("need at least {MIN_HURST_STEPS} steps, got {n}"),
        ));
    }
    let mut scales = Vec::new();
    let mut moments = Vec::new();
    let mut m = 1;
    while n / m >= MIN_BLOCKS {
        let blocks = n / m;
        let sum: f64 = (0..blocks)
            .map(|k| {
                let d = values[(k + 1) * m] - values[k * m];
                d * d
            })
            .sum();
        scales.push(m as f64);
        moments.push(sum / blocks as f64);
        m *= 2;
    }
    // the regression wants a decreasing abscissa
    scales.reverse();
    moments.reverse();
    Ok(rate_regression(&scales, &moments)?.slope / 2.0)
}
