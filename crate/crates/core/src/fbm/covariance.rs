//! Deterministic second-moment oracles for the Liouville processes.

use super::{check_epsilon, HurstParam, TimeGrid};
use crate::error::{Error, Result};
use crate::quad::{integrate, Tolerance};

/// Default tolerance of [`liouville_covariance`].
pub const COVARIANCE_TOLERANCE: Tolerance = Tolerance::new(1e-10, 0.0);

/// Default tolerance of [`eps_diff_variance`]: the looser of 1e-12 absolute
/// and 1e-8 relative.
pub const EPS_DIFF_TOLERANCE: Tolerance = Tolerance::new(1e-12, 1e-8);

fn check_time(name: &'static str, t: f64) -> Result<()> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::invalid(name, alloc::format!("must be nonnegative, got {t}")));
    }
    Ok(())
}

/// `E[B_t B_s] = ∫_0^{min(t,s)} (t − u + ε)^α (s − u + ε)^α du`.
pub fn liouville_covariance(t: f64, s: f64, hurst: HurstParam, epsilon: f64) -> Result<f64> {
    liouville_covariance_with_tolerance(t, s, hurst, epsilon, COVARIANCE_TOLERANCE)
}

pub fn liouville_covariance_with_tolerance(
    t: f64,
    s: f64,
    hurst: HurstParam,
    epsilon: f64,
    tol: Tolerance,
) -> Result<f64> {
    check_time("t", t)?;
    check_time("s", s)?;
    check_epsilon(epsilon, false)?;
    let lo = t.min(s);
    if lo == 0.0 {
        return Ok(0.0);
    }
    let alpha = hurst.alpha();
    if alpha == 0.0 {
        return Ok(lo);
    }
    // v = min(t,s) − u; offsets of the two kernel arguments from v
    let offsets = [t - lo + epsilon, s - lo + epsilon];
    let singular = offsets.iter().filter(|&&o| o == 0.0).count();
    if singular == 0 {
        let f = |v: f64| libm::pow(v + offsets[0], alpha) * libm::pow(v + offsets[1], alpha);
        return Ok(integrate(f, 0.0, lo, tol)?.value);
    }
    // v = w^p with p = 1/(1 + β) absorbs the factor v^β, β = singular·α.
    let beta = singular as f64 * alpha;
    let p = 1.0 / (1.0 + beta);
    let regular: f64 = offsets.iter().copied().fold(0.0, f64::max);
    let f = |w: f64| {
        let v = libm::pow(w, p);
        if singular == 2 {
            p
        } else {
            p * libm::pow(v + regular, alpha)
        }
    };
    Ok(integrate(f, 0.0, libm::pow(lo, 1.0 / p), tol)?.value)
}

/// Covariance of the discretised process on `grid` between nodes `n` and
/// `m`: `Σ_{i<min(n,m)} k((n−i)Δ) k((m−i)Δ) Δ`.
pub fn discrete_covariance(grid: &TimeGrid, hurst: HurstParam, epsilon: f64, n: usize, m: usize) -> f64 {
    let dt = grid.dt();
    let alpha = hurst.alpha();
    let k = |lag: usize| libm::pow(lag as f64 * dt + epsilon, alpha);
    (0..n.min(m)).map(|i| k(n - i) * k(m - i) * dt).sum()
}

/// Mandelbrot–van Ness covariance `½(t^{2H} + s^{2H} − |t − s|^{2H})`.
pub fn mandelbrot_covariance(t: f64, s: f64, hurst: HurstParam) -> Result<f64> {
    check_time("t", t)?;
    check_time("s", s)?;
    let two_h = 2.0 * hurst.h();
    Ok(0.5 * (libm::pow(t, two_h) + libm::pow(s, two_h) - libm::pow((t - s).abs(), two_h)))
}

/// `E[(B^{H,ε}_t − B^H_t)²] = ∫_0^t [(u + ε)^α − u^α]² du`.
pub fn eps_diff_variance(t: f64, hurst: HurstParam, epsilon: f64) -> Result<f64> {
    eps_diff_variance_with_tolerance(t, hurst, epsilon, EPS_DIFF_TOLERANCE)
}

pub fn eps_diff_variance_with_tolerance(
    t: f64,
    hurst: HurstParam,
    epsilon: f64,
    tol: Tolerance,
) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::invalid("t", alloc::format!("must be positive, got {t}")));
    }
    check_epsilon(epsilon, true)?;
    let alpha = hurst.alpha();
    if alpha == 0.0 {
        return Ok(0.0);
    }
    // (u + ε)^α − u^α without cancellation for u ≫ ε
    let gap = |u: f64| libm::pow(u, alpha) * libm::expm1(alpha * libm::log1p(epsilon / u));

    // Near u = 0 substitute u = w^q to smooth the u^α behaviour.
    let split = epsilon.min(t);
    let head = if alpha < 0.0 {
        // q = 1/(1 + 2α): u^{2α} q w^{q−1} = q, so the integrand is
        // q [(u + ε)^α w^{(q−1)/2} − 1]².
        let q = 1.0 / (1.0 + 2.0 * alpha);
        let f = |w: f64| {
            let u = libm::pow(w, q);
            let d = libm::pow(u + epsilon, alpha) * libm::pow(w, 0.5 * (q - 1.0)) - 1.0;
            q * d * d
        };
        integrate(f, 0.0, libm::pow(split, 1.0 / q), tol)?
    } else {
        // q = 1/α: u^α = w, smooth in w.
        let q = 1.0 / alpha;
        let f = |w: f64| {
            let u = libm::pow(w, q);
            let d = libm::pow(u + epsilon, alpha) - w;
            q * libm::pow(w, q - 1.0) * d * d
        };
        integrate(f, 0.0, libm::pow(split, alpha), tol)?
    };
    let tail = integrate(|u| gap(u) * gap(u), split, t, tol)?;
    Ok(head.value + tail.value)
}

/// Discrete counterpart of [`eps_diff_variance`] at node `n`:
/// `Σ_{m=1}^{n} [(mΔ + ε)^α − (mΔ)^α]² Δ`.
pub fn discrete_eps_diff_variance(grid: &TimeGrid, n: usize, hurst: HurstParam, epsilon: f64) -> f64 {
    let dt = grid.dt();
    let alpha = hurst.alpha();
    (1..=n)
        .map(|m| {
            let u = m as f64 * dt;
            let d = libm::pow(u + epsilon, alpha) - libm::pow(u, alpha);
            d * d * dt
        })
        .sum()
}
