use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fbm::{eps_diff_variance, HurstParam};

/// Ordinary least squares fit of `log error = intercept + slope · log ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub eps_values: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

impl RateReport {
    /// `e^{intercept}`, the constant in `error ≈ C ε^slope`.
    pub fn prefactor(&self) -> f64 {
        libm::exp(self.intercept)
    }

    /// The fitted power law at `eps`.
    pub fn predict(&self, eps: f64) -> f64 {
        self.prefactor() * libm::pow(eps, self.slope)
    }
}

/// Fits a power law to at least four `(ε, error)` pairs.
///
/// `eps_values` must be strictly decreasing and every value positive.
pub fn rate_regression(eps_values: &[f64], errors: &[f64]) -> Result<RateReport> {
    if eps_values.len() != errors.len() {
        return Err(Error::DimensionMismatch {
            expected: eps_values.len(),
            found: errors.len(),
        });
    }
    if eps_values.len() < 4 {
        return Err(Error::invalid(
            "eps_values",
            alloc::format!("need at least 4 points, got {}", eps_values.len()),
        ));
    }
    for (name, xs) in [("eps_values", eps_values), ("errors", errors)] {
        if let Some(v) = xs.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::invalid(name, alloc::format!("must be positive and finite, got {v}")));
        }
    }
    if eps_values.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::invalid("eps_values", "must be strictly decreasing"));
    }
    let x: Vec<f64> = eps_values.iter().map(|v| libm::log(*v)).collect();
    let y: Vec<f64> = errors.iter().map(|v| libm::log(*v)).collect();
    let k = x.len() as f64;
    let mx = x.iter().sum::<f64>() / k;
    let my = y.iter().sum::<f64>() / k;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (xi, yi) in x.iter().zip(&y) {
        let (dx, dy) = (xi - mx, yi - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(&y)
        .map(|(xi, yi)| {
            let r = yi - intercept - slope * xi;
            r * r
        })
        .sum();
    // a constant response has nothing left to explain
    let r_squared = if syy == 0.0 { 1.0 } else { (1.0 - sse / syy).clamp(0.0, 1.0) };
    Ok(RateReport {
        eps_values: eps_values.to_vec(),
        errors: errors.to_vec(),
        slope,
        intercept,
        r_squared,
    })
}

/// `{2^−4, …, 2^−10}`.
pub fn default_ladder() -> Vec<f64> {
    (4..=10).map(|k| libm::ldexp(1.0, -k)).collect()
}

/// Rate fits of the quadrature values of `‖B^{H,ε}_t − B^H_t‖` over a ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderFit {
    pub hurst: HurstParam,
    pub t: f64,
    /// Fit of the squared norm; the slope should be close to `2H`.
    pub variance: RateReport,
    /// Fit of the norm itself; the slope should be close to `H`.
    pub rms: RateReport,
}

pub fn quadrature_rate_fit(t: f64, hurst: HurstParam, ladder: &[f64]) -> Result<LadderFit> {
    if hurst.is_brownian() {
        return Err(Error::invalid(
            "hurst",
            "at H = 1/2 the kernels coincide and the difference is identically zero",
        ));
    }
    let variances = ladder
        .iter()
        .map(|&e| eps_diff_variance(t, hurst, e))
        .collect::<Result<Vec<_>>>()?;
    let rms: Vec<f64> = variances.iter().map(|v| libm::sqrt(*v)).collect();
    Ok(LadderFit {
        hurst,
        t,
        variance: rate_regression(ladder, &variances)?,
        rms: rate_regression(ladder, &rms)?,
    })
}
