//! Matrix exponentials: a general scaling-and-squaring route and the
//! trigonometric closed form for 2×2 drift matrices.

use nalgebra::{DMatrix, Matrix2};

use super::LinearModel;
use crate::error::{Error, Result};

// Padé(13) numerator coefficients and the 1-norm up to which the
// unscaled approximant is accurate to double precision (Higham 2005).
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

fn norm1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `e^{Aτ}` for any square matrix by scaling and squaring with the
/// degree-13 Padé approximant.
///
/// A zero matrix maps to the identity exactly.
pub fn expm(a: &DMatrix<f64>, tau: f64) -> DMatrix<f64> {
    let n = a.nrows();
    let mut x = a * tau;
    let norm = norm1(&x);
    let squarings = if norm > THETA13 {
        libm::ceil(libm::log2(norm / THETA13)) as i32
    } else {
        0
    };
    if squarings > 0 {
        x *= libm::ldexp(1.0, -squarings);
    }
    let b = &PADE13;
    let id = DMatrix::<f64>::identity(n, n);
    let x2 = &x * &x;
    let x4 = &x2 * &x2;
    let x6 = &x4 * &x2;
    let inner_u = &x6 * (&x6 * b[13] + &x4 * b[11] + &x2 * b[9]);
    let u = &x * (inner_u + &x6 * b[7] + &x4 * b[5] + &x2 * b[3] + &id * b[1]);
    let inner_v = &x6 * (&x6 * b[12] + &x4 * b[10] + &x2 * b[8]);
    let v = inner_v + &x6 * b[6] + &x4 * b[4] + &x2 * b[2] + &id * b[0];
    let mut r = (&v - &u)
        .lu()
        .solve(&(&v + &u))
        .unwrap_or_else(|| DMatrix::from_element(n, n, f64::NAN));
    for _ in 0..squarings {
        r = &r * &r;
    }
    r
}

/// `e^{Aτ}` for a 2×2 matrix by the general route.
pub fn expm_general(a: &Matrix2<f64>, tau: f64) -> Matrix2<f64> {
    let d = expm(&DMatrix::from_column_slice(2, 2, a.as_slice()), tau);
    Matrix2::from_column_slice(d.as_slice())
}

/// Which value of `ξ` the closed form uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XiVariant {
    /// `ξ = |a₂ − b₂²/4|`, as printed.
    Printed,
    /// `ξ = √|a₂ − b₂²/4|`, the square root of the discriminant.
    SquareRoot,
}

/// Evaluates
///
/// ```text
/// e^{−λτ}/ξ · [(ξ cos ξτ + λ sin ξτ) I + A sin ξτ]
/// ```
///
/// entry by entry:
/// `A₁ = ξ cos ξτ + (λ + a₁) sin ξτ`, `B₁ = b₁ sin ξτ`,
/// `A₂ = a₂ sin ξτ`, `B₂ = ξ cos ξτ + (λ + b₂) sin ξτ`.
///
/// This equals `e^{Aτ}` only when `λ ± iξ` are the eigenvalues of `A`.
pub fn closed_form_exponential(a: &Matrix2<f64>, lambda: f64, xi: f64, tau: f64) -> Result<Matrix2<f64>> {
    if xi == 0.0 || !xi.is_finite() {
        return Err(Error::DegenerateXi);
    }
    let (s, c) = libm::sincos(xi * tau);
    let decay = libm::exp(-lambda * tau);
    let a1 = xi * c + (lambda + a[(0, 0)]) * s;
    let b1 = a[(0, 1)] * s;
    let a2 = a[(1, 0)] * s;
    let b2 = xi * c + (lambda + a[(1, 1)]) * s;
    // divide rather than scale by 1/ξ so that τ = 0 gives I exactly
    Ok(Matrix2::new(
        decay * (a1 / xi),
        decay * (b1 / xi),
        decay * (a2 / xi),
        decay * (b2 / xi),
    ))
}

/// Closed-form exponential together with its distance from the general one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedFormExpm {
    pub matrix: Matrix2<f64>,
    pub reference: Matrix2<f64>,
    /// Frobenius norm of `matrix − reference`.
    pub deviation: f64,
}

impl ClosedFormExpm {
    pub fn relative_deviation(&self) -> f64 {
        self.deviation / self.reference.norm()
    }
}

/// The closed form for a linearised model at lag `tau ≥ 0`.
pub fn expm_paper(model: &LinearModel, tau: f64, variant: XiVariant) -> Result<ClosedFormExpm> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::invalid("tau", alloc::format!("must be nonnegative, got {tau}")));
    }
    let matrix = closed_form_exponential(&model.a, model.lambda, model.xi(variant), tau)?;
    let reference = expm_general(&model.a, tau);
    Ok(ClosedFormExpm {
        matrix,
        reference,
        deviation: (matrix - reference).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_matrix_gives_identity_exactly() {
        assert_eq!(expm_general(&Matrix2::zeros(), 1.7), Matrix2::identity());
        assert_eq!(expm(&DMatrix::zeros(3, 3), 2.0), DMatrix::identity(3, 3));
    }

    #[test]
    fn diagonal_case() {
        let e = expm_general(&Matrix2::new(-2.0, 0.0, 0.0, -4.0), 1.0);
        assert!((e[(0, 0)] - libm::exp(-2.0)).abs() < 1e-15);
        assert!((e[(1, 1)] - libm::exp(-4.0)).abs() < 1e-16);
        assert_eq!(e[(0, 1)], 0.0);
    }

    #[test]
    fn rotation_against_series() {
        let a = Matrix2::new(0.0, 1.0, -1.0, 0.0);
        // Taylor series oracle
        let mut term = Matrix2::identity();
        let mut sum = Matrix2::identity();
        for k in 1..40 {
            term = term * a * FRAC_PI_2 / k as f64;
            sum += term;
        }
        let e = expm_general(&a, FRAC_PI_2);
        assert!((e - sum).norm() < 1e-14);
        assert!((e - Matrix2::new(0.0, 1.0, -1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn closed_form_at_zero_is_identity() {
        let a = Matrix2::new(-8.0, 0.3, 0.3, -2.0);
        for xi in [1.0 / 49.0, 3.0, 0.7] {
            assert_eq!(closed_form_exponential(&a, 1.0, xi, 0.0).unwrap(), Matrix2::identity());
        }
        assert_eq!(closed_form_exponential(&a, 1.0, 0.0, 0.5), Err(Error::DegenerateXi));
    }

    #[test]
    fn closed_form_exact_with_spectral_parameters() {
        // companion matrix with eigenvalues −1 ± i
        let a = Matrix2::new(0.0, 1.0, -2.0, -2.0);
        for tau in [0.1, 0.5, 1.3] {
            let c = closed_form_exponential(&a, 1.0, 1.0, tau).unwrap();
            assert!((c - expm_general(&a, tau)).norm() < 1e-14);
        }
    }
}
