use alloc::vec::Vec;

use nalgebra::Matrix2;

use super::rate::quadrature_rate_fit;
use super::stats::jackknife_se;
use super::EnsemblePath;
use crate::ensemble::{ReplicateMap, WienerEnsemble};
use crate::error::{Error, Result};
use crate::fbm::{fbm_from_wiener, HurstParam};
use crate::steady::{linear_solution, ExpmMode, LinearModel, LinearSolutionPath};

/// `max(|a₁|, |a₂|, |b₁|, |b₂|) / 2`.
pub fn m_paper(a: &Matrix2<f64>) -> f64 {
    a.amax() / 2.0
}

/// `max(|a₁| + |b₁|, |a₂| + |b₂|)`, the row-sum norm of `A`.
pub fn m_safe(a: &Matrix2<f64>) -> f64 {
    let r0 = a[(0, 0)].abs() + a[(0, 1)].abs();
    let r1 = a[(1, 0)].abs() + a[(1, 1)].abs();
    r0.max(r1)
}

/// Per-coordinate constants of `‖B^{H_j,ε_j}_t − B^{H_j}_t‖ ≤ C_j ε_j^{r_j}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GronwallConstants {
    pub prefactor: [f64; 2],
    pub exponent: [f64; 2],
}

impl GronwallConstants {
    /// Fits `C_j` and `r_j` to the quadrature norms `√eps_diff_variance` at
    /// time `t` over `ladder`. A Brownian coordinate has no ε error and gets
    /// `C_j = 0`.
    ///
    /// The variance at fixed `ε` grows with `t`, so fitting at the last
    /// checkpoint covers every earlier one.
    pub fn from_quadrature(t: f64, hurst: [HurstParam; 2], ladder: &[f64]) -> Result<Self> {
        let mut prefactor = [0.0; 2];
        let mut exponent = [1.0; 2];
        for j in 0..2 {
            if hurst[j].is_brownian() {
                continue;
            }
            let fit = quadrature_rate_fit(t, hurst[j], ladder)?;
            prefactor[j] = fit.rms.prefactor();
            exponent[j] = fit.rms.slope;
        }
        Ok(Self { prefactor, exponent })
    }

    /// `√(2T) Σ_j C_j ε_j^{r_j}`.
    pub fn c_alpha_eps(&self, noise_scale: f64, eps: [f64; 2]) -> f64 {
        noise_scale
            * (0..2)
                .map(|j| {
                    if self.prefactor[j] == 0.0 {
                        0.0
                    } else {
                        self.prefactor[j] * libm::pow(eps[j], self.exponent[j])
                    }
                })
                .sum::<f64>()
    }
}

/// Measured coupled distance between `U` and `U^ε` against
/// `C(α, ε) e^{M t}` for both choices of `M`.
///
/// `measured[k]` is `‖U¹ − U^{1,ε}‖ + ‖U² − U^{2,ε}‖` at `t_checkpoints[k]`,
/// a sum of L² norms.
#[derive(Debug, Clone, PartialEq)]
pub struct GronwallReport {
    pub epsilon: [f64; 2],
    pub m_paper: f64,
    pub m_safe: f64,
    pub c_alpha_eps: f64,
    pub t_checkpoints: Vec<f64>,
    pub measured: Vec<f64>,
    pub measured_se: Vec<f64>,
    pub bound_paper: Vec<f64>,
    pub bound_safe: Vec<f64>,
    pub replicates: usize,
}

impl GronwallReport {
    /// Whether `measured ≤ bound_safe` at every checkpoint.
    pub fn safe_bound_holds(&self) -> bool {
        self.measured.iter().zip(&self.bound_safe).all(|(m, b)| m <= b)
    }
}

fn summarise(
    model: &LinearModel,
    eps: [f64; 2],
    checkpoints: &[f64],
    squared: &[[Vec<f64>; 2]],
    constants: &GronwallConstants,
) -> GronwallReport {
    let (mp, ms) = (m_paper(&model.a), m_safe(&model.a));
    let c = constants.c_alpha_eps(model.noise_scale(), eps);
    let mut measured = Vec::with_capacity(checkpoints.len());
    let mut measured_se = Vec::with_capacity(checkpoints.len());
    for cols in squared {
        let stat = |m: &[f64]| libm::sqrt(m[0]) + libm::sqrt(m[1]);
        let n = cols[0].len() as f64;
        let means = [cols[0].iter().sum::<f64>() / n, cols[1].iter().sum::<f64>() / n];
        measured.push(stat(&means));
        measured_se.push(jackknife_se(&[&cols[0], &cols[1]], stat));
    }
    GronwallReport {
        epsilon: eps,
        m_paper: mp,
        m_safe: ms,
        c_alpha_eps: c,
        t_checkpoints: checkpoints.to_vec(),
        bound_paper: checkpoints.iter().map(|t| c * libm::exp(mp * t)).collect(),
        bound_safe: checkpoints.iter().map(|t| c * libm::exp(ms * t)).collect(),
        measured,
        measured_se,
        replicates: squared.first().map_or(0, |c| c[0].len()),
    }
}

/// Gronwall comparison from prebuilt coupled ensembles of exact and
/// ε-driven linear solutions.
pub fn gronwall_from_ensembles(
    model: &LinearModel,
    exact: &[LinearSolutionPath],
    approx: &[LinearSolutionPath],
    checkpoints: &[f64],
    constants: &GronwallConstants,
) -> Result<GronwallReport> {
    if exact.len() != approx.len() {
        return Err(Error::DimensionMismatch {
            expected: exact.len(),
            found: approx.len(),
        });
    }
    if exact.len() < 2 {
        return Err(Error::invalid("replicates", "need at least two replicates"));
    }
    let grid = exact[0].grid;
    let nodes = checkpoints
        .iter()
        .map(|&t| grid.index_of(t))
        .collect::<Result<Vec<_>>>()?;
    let mut squared: Vec<[Vec<f64>; 2]> = nodes
        .iter()
        .map(|_| [Vec::with_capacity(exact.len()), Vec::with_capacity(exact.len())])
        .collect();
    for (r, (x, y)) in exact.iter().zip(approx).enumerate() {
        if x.grid != grid || y.grid != grid {
            return Err(Error::GridMismatch);
        }
        if x.source_seed != y.source_seed {
            return Err(Error::CouplingViolation { replicate: r });
        }
        for (k, &n) in nodes.iter().enumerate() {
            let (a, b) = (x.state(n), y.state(n));
            for j in 0..2 {
                squared[k][j].push((a[j] - b[j]) * (a[j] - b[j]));
            }
        }
    }
    Ok(summarise(model, approx[0].epsilon, checkpoints, &squared, constants))
}

/// Runs the coupled comparison over an ε ladder with `ε₁ = ε₂ = ε` per rung.
///
/// Each replicate draws one two-dimensional Wiener path; the exact solution
/// is computed once and compared against the solution driven by every
/// rung.
pub fn gronwall_ladder<X: ReplicateMap>(
    model: &LinearModel,
    hurst: [HurstParam; 2],
    ladder: &[f64],
    ensemble: &WienerEnsemble,
    checkpoints: &[f64],
    constants: &GronwallConstants,
    exec: &X,
) -> Result<Vec<GronwallReport>> {
    let eps: Vec<[f64; 2]> = ladder.iter().map(|&e| [e, e]).collect();
    gronwall_pairs(model, hurst, &eps, ensemble, checkpoints, constants, exec)
}

/// Single-rung form of [`gronwall_ladder`] with separate `ε₁, ε₂`.
pub fn gronwall_check<X: ReplicateMap>(
    model: &LinearModel,
    hurst: [HurstParam; 2],
    eps: [f64; 2],
    ensemble: &WienerEnsemble,
    checkpoints: &[f64],
    constants: &GronwallConstants,
    exec: &X,
) -> Result<GronwallReport> {
    let mut v = gronwall_pairs(model, hurst, &[eps], ensemble, checkpoints, constants, exec)?;
    Ok(v.remove(0))
}

fn gronwall_pairs<X: ReplicateMap>(
    model: &LinearModel,
    hurst: [HurstParam; 2],
    eps: &[[f64; 2]],
    ensemble: &WienerEnsemble,
    checkpoints: &[f64],
    constants: &GronwallConstants,
    exec: &X,
) -> Result<Vec<GronwallReport>> {
    if ensemble.dims != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: ensemble.dims,
        });
    }
    if ensemble.replicates < 2 {
        return Err(Error::invalid("replicates", "need at least two replicates"));
    }
    let nodes = checkpoints
        .iter()
        .map(|&t| ensemble.grid.index_of(t))
        .collect::<Result<Vec<_>>>()?;
    // per replicate: rung → checkpoint → squared coordinate gaps
    let per_replicate = exec.map_replicates(ensemble.replicates, |r| -> Result<Vec<Vec<[f64; 2]>>> {
        let w = ensemble.path(r);
        let drive = |e: [f64; 2]| -> Result<[_; 2]> {
            Ok([
                fbm_from_wiener(&w, hurst[0], e[0], 0)?,
                fbm_from_wiener(&w, hurst[1], e[1], 1)?,
            ])
        };
        let d = drive([0.0, 0.0])?;
        let u = linear_solution(model, [&d[0], &d[1]], ExpmMode::General)?;
        eps.iter()
            .map(|&e| {
                let de = drive(e)?;
                let ue = linear_solution(model, [&de[0], &de[1]], ExpmMode::General)?;
                Ok(nodes
                    .iter()
                    .map(|&n| {
                        let (a, b) = (u.row(n), ue.row(n));
                        [(a[0] - b[0]) * (a[0] - b[0]), (a[1] - b[1]) * (a[1] - b[1])]
                    })
                    .collect())
            })
            .collect()
    });
    let per_replicate = per_replicate.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(eps
        .iter()
        .enumerate()
        .map(|(k, &e)| {
            let squared: Vec<[Vec<f64>; 2]> = (0..nodes.len())
                .map(|c| {
                    [0, 1].map(|j| per_replicate.iter().map(|rep| rep[k][c][j]).collect())
                })
                .collect();
            summarise(model, e, checkpoints, &squared, constants)
        })
        .collect())
}
