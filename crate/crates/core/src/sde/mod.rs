//! Euler integration of `dX_t = −∇g(X_t) dt + √(2T) dB^H_t`.

mod energy;

pub use energy::{builtin_energy, BuiltinEnergy, EnergyFunction};

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::fbm::{fbm_from_wiener, phi_eps, FbmPath, HurstParam, TimeGrid, WienerPath};

/// Run parameters of the annealing SDE.
///
/// `temperature = 0` is accepted as a zero-noise mode in which the
/// integrator reduces to plain gradient descent.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealingConfig {
    pub temperature: f64,
    pub hurst: Vec<HurstParam>,
    pub epsilon: Vec<f64>,
    pub initial_state: Vec<f64>,
    pub grid: TimeGrid,
}

impl AnnealingConfig {
    pub fn new(
        temperature: f64,
        hurst: Vec<HurstParam>,
        epsilon: Vec<f64>,
        initial_state: Vec<f64>,
        grid: TimeGrid,
    ) -> Result<Self> {
        if !(temperature >= 0.0 && temperature.is_finite()) {
            return Err(Error::invalid(
                "temperature",
                alloc::format!("must be nonnegative and finite, got {temperature}"),
            ));
        }
        let dim = initial_state.len();
        if dim == 0 {
            return Err(Error::invalid("initial_state", "must not be empty"));
        }
        for len in [hurst.len(), epsilon.len()] {
            if len != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: len,
                });
            }
        }
        if let Some(e) = epsilon.iter().find(|e| !(**e >= 0.0 && e.is_finite())) {
            return Err(Error::invalid("epsilon", alloc::format!("must be nonnegative, got {e}")));
        }
        if initial_state.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("initial_state", "must be finite"));
        }
        Ok(Self {
            temperature,
            hurst,
            epsilon,
            initial_state,
            grid,
        })
    }

    pub fn dim(&self) -> usize {
        self.initial_state.len()
    }

    /// `√(2T)`.
    pub fn noise_scale(&self) -> f64 {
        libm::sqrt(2.0 * self.temperature)
    }
}

/// `X_{t_n}` for `n = 0..=N`, stored row by row.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePath {
    pub grid: TimeGrid,
    pub dim: usize,
    pub values: Vec<f64>,
    pub source_seed: u64,
}

impl StatePath {
    pub fn row(&self, n: usize) -> &[f64] {
        &self.values[n * self.dim..(n + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.dim)
    }
}

/// One fBm driver per dimension built from `w` with the config's `H_j, ε_j`.
pub fn driving_paths(cfg: &AnnealingConfig, w: &WienerPath) -> Result<Vec<FbmPath>> {
    if w.grid() != &cfg.grid {
        return Err(Error::GridMismatch);
    }
    (0..cfg.dim())
        .map(|j| fbm_from_wiener(w, cfg.hurst[j], cfg.epsilon[j], j))
        .collect()
}

fn integrate<G, F>(g: &G, cfg: &AnnealingConfig, source_seed: u64, mut noise: F) -> Result<StatePath>
where
    G: EnergyFunction + ?Sized,
    F: FnMut(usize, usize) -> f64,
{
    let dim = cfg.dim();
    if g.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: g.dim(),
        });
    }
    let n_steps = cfg.grid.n_steps();
    let dt = cfg.grid.dt();
    let scale = cfg.noise_scale();
    let mut values = Vec::with_capacity((n_steps + 1) * dim);
    values.extend_from_slice(&cfg.initial_state);
    let mut grad = vec![0.0; dim];
    for n in 0..n_steps {
        let x = &values[n * dim..];
        g.gradient(x, &mut grad);
        let next: Vec<f64> = (0..dim)
            .map(|j| x[j] - grad[j] * dt + scale * noise(n, j))
            .collect();
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { step: n + 1 });
        }
        values.extend_from_slice(&next);
    }
    Ok(StatePath {
        grid: cfg.grid,
        dim,
        values,
        source_seed,
    })
}

/// `X_{n+1} = X_n − ∇g(X_n) Δ + √(2T) ΔB_n`, with `ΔB_n` read from the
/// supplied drivers (exact or ε-approximate).
pub fn euler_maruyama<G: EnergyFunction + ?Sized>(
    g: &G,
    cfg: &AnnealingConfig,
    driving: &[FbmPath],
) -> Result<StatePath> {
    if driving.len() != cfg.dim() {
        return Err(Error::DimensionMismatch {
            expected: cfg.dim(),
            found: driving.len(),
        });
    }
    if driving.iter().any(|b| b.grid != cfg.grid) {
        return Err(Error::GridMismatch);
    }
    let seed = driving[0].source_seed;
    integrate(g, cfg, seed, |n, j| driving[j].increment(n))
}

/// Euler scheme driven by the semimartingale form of `B^{H,ε}`:
/// `ΔB_n^j = α_j φ^{ε_j}_{t_n} Δ + ε_j^{α_j} ΔW_n^j`. Every `ε_j` must be
/// positive.
pub fn euler_semimartingale<G: EnergyFunction + ?Sized>(
    g: &G,
    cfg: &AnnealingConfig,
    w: &WienerPath,
) -> Result<StatePath> {
    if w.grid() != &cfg.grid {
        return Err(Error::GridMismatch);
    }
    if w.dims() != cfg.dim() {
        return Err(Error::DimensionMismatch {
            expected: cfg.dim(),
            found: w.dims(),
        });
    }
    let dt = cfg.grid.dt();
    let mut phis = Vec::with_capacity(cfg.dim());
    let mut coeffs = Vec::with_capacity(cfg.dim());
    for j in 0..cfg.dim() {
        let (h, e) = (cfg.hurst[j], cfg.epsilon[j]);
        phis.push(phi_eps(w, h, e, j)?);
        coeffs.push((h.alpha() * dt, libm::pow(e, h.alpha())));
    }
    integrate(g, cfg, w.seed(), |n, j| {
        let (drift, diffusion) = coeffs[j];
        drift * phis[j].values[n] + diffusion * w.increment(n, j)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fbm::sample_wiener;

    fn quad_identity() -> BuiltinEnergy {
        builtin_energy("quadratic", &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]).unwrap()
    }

    fn cfg(t: f64, hs: [f64; 2], eps: [f64; 2], x0: [f64; 2], n: usize) -> AnnealingConfig {
        AnnealingConfig::new(
            t,
            hs.iter().map(|&h| HurstParam::new(h).unwrap()).collect(),
            eps.to_vec(),
            x0.to_vec(),
            TimeGrid::new(1.0, n).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn zero_noise_quadratic_is_geometric() {
        let c = cfg(0.0, [0.5, 0.7], [0.0, 0.0], [1.0, -2.0], 16);
        let w = sample_wiener(c.grid, 2, 1).unwrap();
        let p = euler_maruyama(&quad_identity(), &c, &driving_paths(&c, &w).unwrap()).unwrap();
        let dt = c.grid.dt();
        for (n, row) in p.rows().enumerate() {
            let f = libm::pow(1.0 - dt, n as f64);
            assert!((row[0] - f).abs() < 1e-14);
            assert!((row[1] + 2.0 * f).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_energy_is_pure_noise() {
        let c = cfg(0.3, [0.3, 0.7], [0.0, 0.05], [0.5, 1.5], 64);
        let w = sample_wiener(c.grid, 2, 8).unwrap();
        let drivers = driving_paths(&c, &w).unwrap();
        let zero = builtin_energy("zero", &[2.0]).unwrap();
        let p = euler_maruyama(&zero, &c, &drivers).unwrap();
        assert_eq!(p.row(0), &c.initial_state[..]);
        let s = c.noise_scale();
        for n in 0..=64 {
            for j in 0..2 {
                let expect = c.initial_state[j] + s * drivers[j].values[n];
                assert!((p.row(n)[j] - expect).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn semimartingale_first_step() {
        let c = cfg(0.5, [0.3, 0.7], [0.1, 0.2], [0.4, -0.1], 32);
        let w = sample_wiener(c.grid, 2, 3).unwrap();
        let g = builtin_energy("double_well", &[1.0]).unwrap();
        let p = euler_semimartingale(&g, &c, &w).unwrap();
        let dt = c.grid.dt();
        let grad = g.gradient_vec(&c.initial_state);
        for j in 0..2 {
            // φ^ε_0 = 0
            let db = libm::pow(c.epsilon[j], c.hurst[j].alpha()) * w.increment(0, j);
            let expect = c.initial_state[j] - grad[j] * dt + c.noise_scale() * db;
            assert_eq!(p.row(1)[j], expect);
        }
    }

    #[test]
    fn semimartingale_requires_positive_epsilon() {
        let c = cfg(0.5, [0.3, 0.7], [0.0, 0.2], [0.0, 0.0], 8);
        let w = sample_wiener(c.grid, 2, 3).unwrap();
        assert!(euler_semimartingale(&quad_identity(), &c, &w).is_err());
    }

    #[test]
    fn schemes_converge_to_each_other() {
        let base = cfg(0.5, [0.3, 0.7], [0.1, 0.1], [0.5, 0.5], 32);
        let g = builtin_energy("double_well", &[1.0]).unwrap();
        let mut w = sample_wiener(base.grid, 2, 55).unwrap();
        let mut prev = f64::INFINITY;
        for _ in 0..4 {
            let mut c = base.clone();
            c.grid = *w.grid();
            let a = euler_maruyama(&g, &c, &driving_paths(&c, &w).unwrap()).unwrap();
            let b = euler_semimartingale(&g, &c, &w).unwrap();
            let dev = a
                .values
                .iter()
                .zip(&b.values)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            assert!(dev < prev, "{dev} !< {prev}");
            prev = dev;
            w = w.refine();
        }
    }

    #[test]
    fn gradient_descent_energy_decreases() {
        // L = largest eigenvalue of Q; Δ < 2/L keeps descent monotone.
        let g = builtin_energy("quadratic", &[3.0, 1.0, 1.0, 2.0, 0.5, 0.5]).unwrap();
        let c = cfg(0.0, [0.5, 0.5], [0.0, 0.0], [4.0, -3.0], 8);
        assert!(c.grid.dt() < 2.0 / 3.62);
        let w = sample_wiener(c.grid, 2, 0).unwrap();
        let p = euler_maruyama(&g, &c, &driving_paths(&c, &w).unwrap()).unwrap();
        let e: Vec<f64> = p.rows().map(|x| g.value(x)).collect();
        assert!(e.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn divergence_is_reported() {
        let g = builtin_energy("rosenbrock", &[1.0, 100.0]).unwrap();
        let c = AnnealingConfig::new(
            0.0,
            vec![HurstParam::new(0.5).unwrap(); 2],
            vec![0.0; 2],
            vec![3.0, -3.0],
            TimeGrid::new(10.0, 10).unwrap(),
        )
        .unwrap();
        let w = sample_wiener(c.grid, 2, 0).unwrap();
        let err = euler_maruyama(&g, &c, &driving_paths(&c, &w).unwrap()).unwrap_err();
        assert!(matches!(err, Error::NonFinite { .. }), "{err:?}");
    }

    #[test]
    fn mismatches_are_rejected() {
        let c = cfg(0.5, [0.5, 0.5], [0.0, 0.0], [0.0, 0.0], 8);
        let other = TimeGrid::new(1.0, 16).unwrap();
        let w = sample_wiener(other, 2, 0).unwrap();
        assert_eq!(driving_paths(&c, &w), Err(Error::GridMismatch));
        let w = sample_wiener(c.grid, 2, 0).unwrap();
        let d = driving_paths(&c, &w).unwrap();
        assert!(euler_maruyama(&quad_identity(), &c, &d[..1]).is_err());
        let g1 = builtin_energy("quadratic", &[1.0, 0.0]).unwrap();
        assert!(euler_maruyama(&g1, &c, &d).is_err());
        assert!(AnnealingConfig::new(-1.0, vec![], vec![], vec![0.0], c.grid).is_err());
        assert!(AnnealingConfig::new(1.0, vec![c.hurst[0]], vec![0.0, 0.0], vec![0.0], c.grid).is_err());
    }
}
