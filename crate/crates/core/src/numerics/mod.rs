//! Dense linear algebra and integration primitives.
//!
//! Matrices are `nalgebra` dynamic matrices; real ones hold quadrature-basis
//! drifts and covariances, complex ones hold mode-basis and harmonic blocks.

mod lyapunov;
mod ode;
mod quad;

pub use lyapunov::{lyapunov_residual, solve_lyapunov, solve_lyapunov_complex};
pub use ode::{integrate_lyapunov_ode, integrate_lyapunov_ode_with, OdeOptions, OdeStats};
pub use quad::{integrate_1d, integrate_1d_vec, QuadOptions, Quadrature};

use nalgebra::{ComplexField, DMatrix, Schur};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type RMatrix = DMatrix<f64>;
pub type CMatrix = DMatrix<Complex64>;

const SCHUR_MAX_ITER: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    pub spectral_abscissa: f64,
    pub is_stable: bool,
}

impl StabilityReport {
    fn from_abscissa(abscissa: f64, norm: f64) -> Self {
        StabilityReport { spectral_abscissa: abscissa, is_stable: abscissa < -1e-12 * norm }
    }
}

pub fn is_finite_real(a: &RMatrix) -> bool {
    a.iter().all(|x| x.is_finite())
}

pub fn is_finite_complex(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Eigenvalues of a real square matrix.
pub fn eigenvalues(a: &RMatrix) -> Result<alloc::vec::Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: a.ncols() });
    }
    if !is_finite_real(a) {
        return Err(Error::NonFinite);
    }
    let schur = Schur::try_new(a.clone(), f64::EPSILON, SCHUR_MAX_ITER).ok_or(Error::NonConvergent { what: "real Schur decomposition" })?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

/// Eigenvalues of a complex square matrix.
pub fn eigenvalues_complex(a: &CMatrix) -> Result<alloc::vec::Vec<Complex64>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), got: a.ncols() });
    }
    if !is_finite_complex(a) {
        return Err(Error::NonFinite);
    }
    let (_, t) = complex_schur(a)?;
    Ok(t.diagonal().iter().copied().collect())
}

pub(crate) fn complex_schur(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    let schur =
        Schur::try_new(a.clone(), f64::EPSILON, SCHUR_MAX_ITER).ok_or(Error::NonConvergent { what: "complex Schur decomposition" })?;
    Ok(schur.unpack())
}

pub fn stability_report(a: &RMatrix) -> Result<StabilityReport> {
    let eig = eigenvalues(a)?;
    let abscissa = eig.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(StabilityReport::from_abscissa(abscissa, a.norm()))
}

pub fn stability_report_complex(a: &CMatrix) -> Result<StabilityReport> {
    let eig = eigenvalues_complex(a)?;
    let abscissa = eig.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Ok(StabilityReport::from_abscissa(abscissa, norm))
}

pub fn to_complex(a: &RMatrix) -> CMatrix {
    a.map(|x| Complex64::new(x, 0.0))
}

pub fn symmetrize(v: &RMatrix) -> RMatrix {
    (v + v.transpose()) * 0.5
}

pub fn hermitize(v: &CMatrix) -> CMatrix {
    (v + v.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Largest absolute entry.
pub fn max_abs(a: &RMatrix) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn max_abs_complex(a: &CMatrix) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.modulus()))
}
