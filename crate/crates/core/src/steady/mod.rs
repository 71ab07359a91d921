//! Steady states, linearisation around them, and the explicit solution of
//! the linearised fractional system
//!
//! ```text
//! dU_t = A U_t dt + √(2T) dB_t,   U_0 = 0,   A = −Hess g(X*).
//! ```

mod expm;

pub use expm::{
    closed_form_exponential, expm, expm_general, expm_paper, ClosedFormExpm, XiVariant,
};

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::fbm::{FbmPath, TimeGrid};
use crate::sde::{EnergyFunction, StatePath};

/// A point where `∇g` vanishes to solver tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub point: Vec<f64>,
    pub gradient_norm: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Step halvings tried before a direction is abandoned.
    pub max_halvings: u32,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 100,
            max_halvings: 30,
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    libm::sqrt(v.iter().map(|x| x * x).sum())
}

/// Solves `∇g(x) = 0` from `x_init`.
///
/// Each iteration tries the Newton step `p = −H⁻¹∇g`, halving it until the
/// Armijo condition on `g` holds. The Newton step is skipped when `H` is
/// singular or `p` is not a descent direction of `g`; the iteration then
/// takes a gradient step with the same backtracking. Started away from a stationary
/// point the search therefore settles in a local minimum of `g`.
pub fn find_steady_state<G: EnergyFunction + ?Sized>(
    g: &G,
    x_init: &[f64],
    opts: SolverOptions,
) -> Result<SteadyState> {
    if x_init.len() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: x_init.len(),
        });
    }
    if !(opts.tol > 0.0) {
        return Err(Error::invalid("tol", "must be positive"));
    }
    let mut x = x_init.to_vec();
    let mut grad = g.gradient_vec(&x);
    let mut gn = norm(&grad);
    let mut iterations = 0;
    let mut trial = vec![0.0; x.len()];
    loop {
        if gn <= opts.tol {
            return Ok(SteadyState {
                point: x,
                gradient_norm: gn,
                iterations,
            });
        }
        if iterations == opts.max_iter || !gn.is_finite() {
            return Err(Error::NonConvergence {
                best: x,
                gradient_norm: gn,
                iterations,
            });
        }
        iterations += 1;

        let newton = g
            .hessian(&x)
            .lu()
            .solve(&-DVector::from_column_slice(&grad))
            .filter(|p| p.iter().all(|v| v.is_finite()))
            .filter(|p| p.dot(&DVector::from_column_slice(&grad)) < 0.0);

        let mut accepted = false;
        if let Some(p) = newton {
            let e0 = g.value(&x);
            let slope: f64 = p.iter().zip(&grad).map(|(a, b)| a * b).sum();
            // near the minimum the decrease of g drowns in rounding, so a
            // drop of |∇g| at no visible cost in g is accepted as well
            let flat = 64.0 * f64::EPSILON * e0.abs();
            let mut step = 1.0;
            for _ in 0..=opts.max_halvings {
                for i in 0..x.len() {
                    trial[i] = x[i] + step * p[i];
                }
                let te = g.value(&trial);
                let tg = g.gradient_vec(&trial);
                let tn = norm(&tg);
                if te <= e0 + 1e-4 * step * slope || (tn < gn && te <= e0 + flat) {
                    x.copy_from_slice(&trial);
                    grad = tg;
                    gn = tn;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
        }
        if !accepted {
            let e0 = g.value(&x);
            let mut step = 1.0;
            for _ in 0..=opts.max_halvings {
                for i in 0..x.len() {
                    trial[i] = x[i] - step * grad[i];
                }
                if g.value(&trial) <= e0 - 1e-4 * step * gn * gn {
                    x.copy_from_slice(&trial);
                    grad = g.gradient_vec(&x);
                    gn = norm(&grad);
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
        }
        if !accepted {
            return Err(Error::NonConvergence {
                best: x,
                gradient_norm: gn,
                iterations,
            });
        }
    }
}

/// Drift matrix `A = −Hess g(X*)` of the linearised system, any dimension.
pub fn linear_drift<G: EnergyFunction + ?Sized>(g: &G, steady: &SteadyState) -> DMatrix<f64> {
    -g.hessian(&steady.point)
}

/// Everything the explicit two-dimensional solution consumes.
///
/// `A = [[a₁, b₁], [a₂, b₂]]`, `λ = −b₂/2`, and both readings of `ξ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    pub steady: SteadyState,
    pub a: Matrix2<f64>,
    pub lambda: f64,
    pub xi_paper: f64,
    pub xi_sqrt: f64,
    pub temperature: f64,
}

impl LinearModel {
    /// Builds the model from an explicit drift matrix.
    pub fn from_matrix(steady: SteadyState, a: Matrix2<f64>, temperature: f64) -> Result<Self> {
        if !(temperature >= 0.0 && temperature.is_finite()) {
            return Err(Error::invalid("temperature", "must be nonnegative"));
        }
        let (a2, b2) = (a[(1, 0)], a[(1, 1)]);
        let xi_paper = (a2 - b2 * b2 / 4.0).abs();
        Ok(Self {
            steady,
            a,
            lambda: -b2 / 2.0,
            xi_paper,
            xi_sqrt: libm::sqrt(xi_paper),
            temperature,
        })
    }

    pub fn a1(&self) -> f64 {
        self.a[(0, 0)]
    }

    pub fn b1(&self) -> f64 {
        self.a[(0, 1)]
    }

    pub fn a2(&self) -> f64 {
        self.a[(1, 0)]
    }

    pub fn b2(&self) -> f64 {
        self.a[(1, 1)]
    }

    pub fn xi(&self, variant: XiVariant) -> f64 {
        match variant {
            XiVariant::Printed => self.xi_paper,
            XiVariant::SquareRoot => self.xi_sqrt,
        }
    }

    /// `√(2T)`.
    pub fn noise_scale(&self) -> f64 {
        libm::sqrt(2.0 * self.temperature)
    }
}

/// Linearises a two-dimensional energy at `steady`.
pub fn linearize<G: EnergyFunction + ?Sized>(
    g: &G,
    steady: &SteadyState,
    temperature: f64,
) -> Result<LinearModel> {
    if g.dim() != 2 || steady.point.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: g.dim(),
        });
    }
    let h = linear_drift(g, steady);
    let a = Matrix2::new(h[(0, 0)], h[(0, 1)], h[(1, 0)], h[(1, 1)]);
    let scale = a.amax().max(f64::MIN_POSITIVE);
    if (a[(0, 1)] - a[(1, 0)]).abs() > 1e-10 * scale {
        return Err(Error::invalid("hessian", "not symmetric at the steady state"));
    }
    LinearModel::from_matrix(steady.clone(), a, temperature)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpmMode {
    General,
    ClosedForm(XiVariant),
}

/// Lag assigned to the increment `ΔB_i` in the solution at `t_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LagConvention {
    /// `t_n − t_i` (Itô left endpoint).
    #[default]
    LeftEndpoint,
    /// `t_n − t_{i+1}`.
    RightEndpoint,
}

/// `U_{t_n}` for `n = 0..=N`, stored as rows of two.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolutionPath {
    pub grid: TimeGrid,
    pub values: Vec<f64>,
    pub epsilon: [f64; 2],
    pub source_seed: u64,
}

impl LinearSolutionPath {
    pub fn row(&self, n: usize) -> &[f64] {
        &self.values[2 * n..2 * n + 2]
    }
}

/// `U_{t_n} = Σ_{i<n} e^{A(t_n − t_i)} √(2T) ΔB_i` with the chosen exponential.
pub fn linear_solution(
    model: &LinearModel,
    driving: [&FbmPath; 2],
    mode: ExpmMode,
) -> Result<LinearSolutionPath> {
    linear_solution_with_lag(model, driving, mode, LagConvention::LeftEndpoint)
}

pub fn linear_solution_with_lag(
    model: &LinearModel,
    driving: [&FbmPath; 2],
    mode: ExpmMode,
    lag: LagConvention,
) -> Result<LinearSolutionPath> {
    let grid = driving[0].grid;
    if driving[1].grid != grid {
        return Err(Error::GridMismatch);
    }
    let n_steps = grid.n_steps();
    let dt = grid.dt();
    let c = model.noise_scale();
    let b = |n: usize| Vector2::new(driving[0].values[n], driving[1].values[n]);
    let mut values = vec![0.0; 2 * (n_steps + 1)];

    match mode {
        ExpmMode::General => {
            // With E = e^{AΔ} and summation by parts,
            //   R_n = Σ_{i<n} E^{n−1−i} ΔB_i = B_n + W_n,
            //   W_{n+1} = E W_n + (E − I) B_n,
            // and the left-endpoint solution is E R_n. For A = 0 every
            // correction term is an exact zero.
            let e = expm_general(&model.a, dt);
            let mut d = e;
            d[(0, 0)] -= 1.0;
            d[(1, 1)] -= 1.0;
            let mut w = Vector2::zeros();
            for n in 0..n_steps {
                w = e * w + d * b(n);
                let r = b(n + 1) + w;
                let u = match lag {
                    LagConvention::LeftEndpoint => e * r,
                    LagConvention::RightEndpoint => r,
                };
                values[2 * (n + 1)] = c * u[0];
                values[2 * (n + 1) + 1] = c * u[1];
            }
        }
        ExpmMode::ClosedForm(variant) => {
            let xi = model.xi(variant);
            let table = (0..=n_steps)
                .map(|k| closed_form_exponential(&model.a, model.lambda, xi, k as f64 * dt))
                .collect::<Result<Vec<_>>>()?;
            let db: Vec<Vector2<f64>> = (0..n_steps).map(|i| b(i + 1) - b(i)).collect();
            let shift = match lag {
                LagConvention::LeftEndpoint => 0,
                LagConvention::RightEndpoint => 1,
            };
            for n in 1..=n_steps {
                let u = db[..n]
                    .iter()
                    .enumerate()
                    .fold(Vector2::zeros(), |acc, (i, inc)| acc + table[n - i - shift] * inc);
                values[2 * n] = c * u[0];
                values[2 * n + 1] = c * u[1];
            }
        }
    }
    Ok(LinearSolutionPath {
        grid,
        values,
        epsilon: [driving[0].epsilon, driving[1].epsilon],
        source_seed: driving[0].source_seed,
    })
}

/// `X_t = X* + U_t` row by row.
pub fn reconstruct_state(steady: &SteadyState, u: &LinearSolutionPath) -> Result<StatePath> {
    if steady.point.len() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: steady.point.len(),
        });
    }
    let values = u
        .values
        .chunks_exact(2)
        .flat_map(|row| [steady.point[0] + row[0], steady.point[1] + row[1]])
        .collect();
    Ok(StatePath {
        grid: u.grid,
        dim: 2,
        values,
        source_seed: u.source_seed,
    })
}
