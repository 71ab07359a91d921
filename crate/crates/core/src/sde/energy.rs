use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A `C²` energy landscape `g : R^d → R`.
pub trait EnergyFunction {
    fn name(&self) -> &str;

    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    /// Writes `∇g(x)` into `out`.
    fn gradient(&self, x: &[f64], out: &mut [f64]);

    fn hessian(&self, x: &[f64]) -> DMatrix<f64>;

    fn gradient_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.gradient(x, &mut out);
        out
    }
}

/// The landscapes available by name from [`builtin_energy`].
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinEnergy {
    /// `g ≡ 0`; isolates the noise term.
    Zero { dim: usize },
    /// `½ (x − m)ᵀ Q (x − m)` with `Q` symmetric positive definite.
    Quadratic { q: DMatrix<f64>, m: DVector<f64> },
    /// `(x₁² − 1)² + κ x₂²`.
    DoubleWell { kappa: f64 },
    /// `(a − x₁)² + b (x₂ − x₁²)²`.
    Rosenbrock { a: f64, b: f64 },
}

fn arity(name: &str, expected: &str, found: usize) -> Error {
    Error::invalid(
        "params",
        alloc::format!("`{name}` takes {expected} parameters, got {found}"),
    )
}

/// Looks up an energy family by name.
///
/// Parameters:
/// * `zero`: `[d]`
/// * `quadratic`: the `d × d` matrix `Q` row-major followed by `m` (`d² + d` values)
/// * `double_well`: `[κ]`
/// * `rosenbrock`: `[a, b]`
pub fn builtin_energy(name: &str, params: &[f64]) -> Result<BuiltinEnergy> {
    match name {
        "zero" => {
            let [d] = params else {
                return Err(arity(name, "1", params.len()));
            };
            if !(*d >= 1.0 && libm::trunc(*d) == *d) {
                return Err(Error::invalid("params", "dimension must be a positive integer"));
            }
            Ok(BuiltinEnergy::Zero { dim: *d as usize })
        }
        "quadratic" => {
            // L = d² + d
            let l = params.len();
            let d = (libm::sqrt(1.0 + 4.0 * l as f64) - 1.0) / 2.0;
            let d = libm::round(d) as usize;
            if d == 0 || d * d + d != l {
                return Err(arity(name, "d² + d", l));
            }
            let q = DMatrix::from_row_slice(d, d, &params[..d * d]);
            let m = DVector::from_column_slice(&params[d * d..]);
            BuiltinEnergy::quadratic(q, m)
        }
        "double_well" => {
            let [kappa] = params else {
                return Err(arity(name, "1", params.len()));
            };
            Ok(BuiltinEnergy::DoubleWell { kappa: *kappa })
        }
        "rosenbrock" => {
            let [a, b] = params else {
                return Err(arity(name, "2", params.len()));
            };
            Ok(BuiltinEnergy::Rosenbrock { a: *a, b: *b })
        }
        other => Err(Error::UnknownEnergy(other.to_string())),
    }
}

impl BuiltinEnergy {
    pub fn quadratic(q: DMatrix<f64>, m: DVector<f64>) -> Result<Self> {
        if !q.is_square() || q.nrows() != m.len() {
            return Err(Error::DimensionMismatch {
                expected: m.len(),
                found: q.nrows(),
            });
        }
        let scale = q.amax().max(f64::MIN_POSITIVE);
        if (&q - q.transpose()).amax() > 1e-12 * scale || q.clone().cholesky().is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(BuiltinEnergy::Quadratic { q, m })
    }
}

impl EnergyFunction for BuiltinEnergy {
    fn name(&self) -> &str {
        match self {
            BuiltinEnergy::Zero { .. } => "zero",
            BuiltinEnergy::Quadratic { .. } => "quadratic",
            BuiltinEnergy::DoubleWell { .. } => "double_well",
            BuiltinEnergy::Rosenbrock { .. } => "rosenbrock",
        }
    }

    fn dim(&self) -> usize {
        match self {
            BuiltinEnergy::Zero { dim } => *dim,
            BuiltinEnergy::Quadratic { m, .. } => m.len(),
            BuiltinEnergy::DoubleWell { .. } | BuiltinEnergy::Rosenbrock { .. } => 2,
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        match self {
            BuiltinEnergy::Zero { .. } => 0.0,
            BuiltinEnergy::Quadratic { q, m } => {
                let d = DVector::from_column_slice(x) - m;
                0.5 * d.dot(&(q * &d))
            }
            BuiltinEnergy::DoubleWell { kappa } => {
                let w = x[0] * x[0] - 1.0;
                w * w + kappa * x[1] * x[1]
            }
            BuiltinEnergy::Rosenbrock { a, b } => {
                let u = a - x[0];
                let v = x[1] - x[0] * x[0];
                u * u + b * v * v
            }
        }
    }

    fn gradient(&self, x: &[f64], out: &mut [f64]) {
        match self {
            BuiltinEnergy::Zero { .. } => out.fill(0.0),
            BuiltinEnergy::Quadratic { q, m } => {
                let d = DVector::from_column_slice(x) - m;
                out.copy_from_slice((q * d).as_slice());
            }
            BuiltinEnergy::DoubleWell { kappa } => {
                out[0] = 4.0 * x[0] * (x[0] * x[0] - 1.0);
                out[1] = 2.0 * kappa * x[1];
            }
            BuiltinEnergy::Rosenbrock { a, b } => {
                let v = x[1] - x[0] * x[0];
                out[0] = -2.0 * (a - x[0]) - 4.0 * b * x[0] * v;
                out[1] = 2.0 * b * v;
            }
        }
    }

    fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        match self {
            BuiltinEnergy::Zero { dim } => DMatrix::zeros(*dim, *dim),
            BuiltinEnergy::Quadratic { q, .. } => q.clone(),
            BuiltinEnergy::DoubleWell { kappa } => {
                DMatrix::from_row_slice(2, 2, &[12.0 * x[0] * x[0] - 4.0, 0.0, 0.0, 2.0 * kappa])
            }
            BuiltinEnergy::Rosenbrock { b, .. } => {
                let h11 = 2.0 - 4.0 * b * (x[1] - x[0] * x[0]) + 8.0 * b * x[0] * x[0];
                let h12 = -4.0 * b * x[0];
                DMatrix::from_row_slice(2, 2, &[h11, h12, h12, 2.0 * b])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fd_gradient(g: &BuiltinEnergy, x: &[f64]) -> Vec<f64> {
        (0..g.dim())
            .map(|i| {
                let h = 1e-5 * x[i].abs().max(1.0);
                let mut p = x.to_vec();
                let mut m = x.to_vec();
                p[i] += h;
                m[i] -= h;
                (g.value(&p) - g.value(&m)) / (2.0 * h)
            })
            .collect()
    }

    fn fd_hessian(g: &BuiltinEnergy, x: &[f64]) -> DMatrix<f64> {
        let d = g.dim();
        let mut h = DMatrix::zeros(d, d);
        for j in 0..d {
            let step = 1e-5 * x[j].abs().max(1.0);
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[j] += step;
            m[j] -= step;
            let gp = g.gradient_vec(&p);
            let gm = g.gradient_vec(&m);
            for i in 0..d {
                h[(i, j)] = (gp[i] - gm[i]) / (2.0 * step);
            }
        }
        h
    }

    fn rel_err(a: &[f64], b: &[f64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
        let den: f64 = b.iter().map(|y| y * y).sum();
        libm::sqrt(num) / libm::sqrt(den).max(1.0)
    }

    fn energies() -> Vec<BuiltinEnergy> {
        vec![
            builtin_energy("quadratic", &[2.0, 0.5, 0.5, 1.0, 1.0, -1.0]).unwrap(),
            builtin_energy("double_well", &[1.0]).unwrap(),
            builtin_energy("rosenbrock", &[1.0, 100.0]).unwrap(),
            builtin_energy("zero", &[2.0]).unwrap(),
        ]
    }

    proptest! {
        #[test]
        fn analytic_derivatives_match_finite_differences(x0 in -2.0f64..2.0, x1 in -2.0f64..2.0) {
            let x = [x0, x1];
            for g in energies() {
                prop_assert!(rel_err(&g.gradient_vec(&x), &fd_gradient(&g, &x)) <= 1e-6, "{}", g.name());
                let h = g.hessian(&x);
                let fd = fd_hessian(&g, &x);
                prop_assert!(rel_err(h.as_slice(), fd.as_slice()) <= 1e-4, "{}", g.name());
                prop_assert_eq!(&h, &h.transpose());
            }
        }
    }

    #[test]
    fn identity_quadratic_gradient_is_x() {
        let g = builtin_energy("quadratic", &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        assert_eq!(g.gradient_vec(&[0.3, -2.0]), [0.3, -2.0]);
        assert_eq!(g.gradient_vec(&[0.0, 0.0]), [0.0, 0.0]);
    }

    #[test]
    fn double_well_stationary_points() {
        let g = builtin_energy("double_well", &[1.0]).unwrap();
        for x in [[1.0, 0.0], [-1.0, 0.0], [0.0, 0.0]] {
            assert_eq!(g.gradient_vec(&x), [0.0, 0.0]);
        }
        assert_eq!(g.gradient_vec(&[0.5, 0.3]), [4.0 * 0.5 * (0.25 - 1.0), 0.6]);
    }

    #[test]
    fn rosenbrock_minimum() {
        let g = builtin_energy("rosenbrock", &[1.0, 100.0]).unwrap();
        assert_eq!(g.value(&[1.0, 1.0]), 0.0);
        assert_eq!(g.gradient_vec(&[1.0, 1.0]), [0.0, 0.0]);
    }

    #[test]
    fn rejects_bad_definitions() {
        assert!(matches!(builtin_energy("sphere", &[]), Err(Error::UnknownEnergy(_))));
        assert!(builtin_energy("rosenbrock", &[1.0]).is_err());
        assert!(builtin_energy("double_well", &[]).is_err());
        assert!(builtin_energy("quadratic", &[1.0, 2.0, 3.0]).is_err());
        assert!(builtin_energy("zero", &[1.5]).is_err());
        // indefinite
        assert_eq!(
            builtin_energy("quadratic", &[1.0, 0.0, 0.0, -1.0, 0.0, 0.0]),
            Err(Error::NotPositiveDefinite)
        );
        // asymmetric
        assert_eq!(
            builtin_energy("quadratic", &[1.0, 0.5, 0.0, 1.0, 0.0, 0.0]),
            Err(Error::NotPositiveDefinite)
        );
        // one-dimensional quadratic is fine
        assert_eq!(builtin_energy("quadratic", &[3.0, 1.0]).unwrap().dim(), 1);
    }
}
