//! Two-mode Gaussian state metrics.
//!
//! Covariances are symmetrically ordered, vacuum = ½ on the diagonal, in
//! the basis (X_a, P_a, X_b, P_b) unless stated otherwise.

use alloc::vec::Vec;

use nalgebra::{Cholesky, Matrix2};
use num_traits::Float;

use crate::error::{Error, Result};
use crate::numerics::{eigenvalues, RMatrix};

pub const TWO_MODE_LABELS: [&str; 4] = ["X_a", "P_a", "X_b", "P_b"];
pub const THREE_MODE_LABELS: [&str; 6] = ["X_a", "P_a", "X_b", "P_b", "X_c", "P_c"];

const PHYS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix {
    labels: Vec<&'static str>,
    v: RMatrix,
}

impl CovarianceMatrix {
    /// Wraps a real symmetric matrix with default (X, P) labels per mode.
    pub fn new(v: RMatrix) -> Result<Self> {
        let n = v.nrows();
        if !v.is_square() || n == 0 || !n.is_multiple_of(2) {
            return Err(Error::DimensionMismatch { expected: 4, got: n });
        }
        if !v.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let labels = match n {
            4 => TWO_MODE_LABELS.to_vec(),
            6 => THREE_MODE_LABELS.to_vec(),
            _ => (0..n).map(|i| if i % 2 == 0 { "X" } else { "P" }).collect(),
        };
        Ok(CovarianceMatrix { labels, v: crate::numerics::symmetrize(&v) })
    }

    pub fn with_labels(v: RMatrix, labels: Vec<&'static str>) -> Result<Self> {
        let mut c = Self::new(v)?;
        if labels.len() != c.dim() {
            return Err(Error::DimensionMismatch { expected: c.dim(), got: labels.len() });
        }
        c.labels = labels;
        Ok(c)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self::new(RMatrix::identity(2 * modes, 2 * modes) * 0.5).expect("vacuum is valid")
    }

    pub fn matrix(&self) -> &RMatrix {
        &self.v
    }

    pub fn labels(&self) -> &[&'static str] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.v.nrows()
    }

    /// Reduced state of modes a and b (first four quadratures).
    pub fn two_mode(&self) -> Result<CovarianceMatrix> {
        if self.dim() < 4 {
            return Err(Error::DimensionMismatch { expected: 4, got: self.dim() });
        }
        Ok(CovarianceMatrix { labels: self.labels[..4].to_vec(), v: self.v.view((0, 0), (4, 4)).into_owned() })
    }

    fn block(&self, r: usize, c: usize) -> Matrix2<f64> {
        Matrix2::new(self.v[(r, c)], self.v[(r, c + 1)], self.v[(r + 1, c)], self.v[(r + 1, c + 1)])
    }

    fn require_two_mode(&self) -> Result<()> {
        if self.dim() != 4 {
            return Err(Error::DimensionMismatch { expected: 4, got: self.dim() });
        }
        Ok(())
    }
}

/// Thermal two-mode squeezed state covariance with V_ab = diag(−c_ab, c_ab).
pub fn ttmss_covariance(xi: f64, n_a: f64, n_b: f64) -> CovarianceMatrix {
    let (ch2, sh2) = (xi.cosh().powi(2), xi.sinh().powi(2));
    let ca = (n_a + 0.5) * ch2 + (n_b + 0.5) * sh2;
    let cb = (n_b + 0.5) * ch2 + (n_a + 0.5) * sh2;
    let cab = (n_a + n_b + 1.0) * xi.sinh() * xi.cosh();
    #[rustfmt::skip]
    let v = RMatrix::from_row_slice(4, 4, &[
        ca, 0.0, -cab, 0.0,
        0.0, ca, 0.0, cab,
        -cab, 0.0, cb, 0.0,
        0.0, cab, 0.0, cb,
    ]);
    CovarianceMatrix::new(v).expect("finite TTMSS")
}

/// Pure two-mode squeezed vacuum.
pub fn tmss_covariance(r: f64) -> CovarianceMatrix {
    ttmss_covariance(r, 0.0, 0.0)
}

/// Symplectic eigenvalues (ascending, one per mode) from the spectrum of Ω_symp·V.
pub fn symplectic_eigenvalues(v: &CovarianceMatrix) -> Result<Vec<f64>> {
    let n = v.dim();
    let mut omega = RMatrix::zeros(n, n);
    for m in 0..n / 2 {
        omega[(2 * m, 2 * m + 1)] = 1.0;
        omega[(2 * m + 1, 2 * m)] = -1.0;
    }
    // With V = LLᵀ the singular values of LᵀΩL are the ν, each twice.
    // Francis QR on Ω·V itself can stall on exactly degenerate pure states.
    let mut nus: Vec<f64> = match Cholesky::new(v.matrix().clone()) {
        Some(ch) => {
            let l = ch.l();
            (l.transpose() * omega * &l).singular_values().iter().copied().collect()
        }
        None => eigenvalues(&(omega * v.matrix()))?.iter().map(|z| z.im.abs()).collect(),
    };
    nus.sort_by(f64::total_cmp);
    Ok(nus.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect())
}

pub fn is_physical(v: &CovarianceMatrix, tol: f64) -> Result<bool> {
    let nus = symplectic_eigenvalues(v)?;
    Ok(nus.iter().all(|nu| *nu >= 0.5 - tol))
}

fn check_physical(v: &CovarianceMatrix) -> Result<()> {
    let nus = symplectic_eigenvalues(v)?;
    let nu_min = nus.iter().copied().fold(f64::INFINITY, f64::min);
    if nu_min < 0.5 - PHYS_TOL {
        return Err(Error::UnphysicalState { nu_min });
    }
    Ok(())
}

/// ⟨X₊²⟩ + ⟨P₋²⟩ with X± = (X_a ± X_b)/√2, P± likewise.
pub fn duan_quantity(v: &CovarianceMatrix) -> Result<f64> {
    v.require_two_mode()?;
    let m = v.matrix();
    Ok(0.5 * (m[(0, 0)] + m[(2, 2)] + 2.0 * m[(0, 2)]) + 0.5 * (m[(1, 1)] + m[(3, 3)] - 2.0 * m[(1, 3)]))
}

/// Smallest symplectic eigenvalue of the partial transpose.
pub fn partial_transpose_eta(v: &CovarianceMatrix) -> Result<f64> {
    v.require_two_mode()?;
    let det_v = v.matrix().determinant();
    let sigma = v.block(0, 0).determinant() + v.block(2, 2).determinant() - 2.0 * v.block(0, 2).determinant();
    let disc = (sigma * sigma - 4.0 * det_v).max(0.0);
    // smaller root of t² − σt + det V via the product form, avoiding σ − √disc
    let root_sum = sigma + disc.sqrt();
    if !(root_sum > 0.0) {
        return Ok(0.0);
    }
    Ok((2.0 * det_v.max(0.0) / root_sum).sqrt())
}

pub fn log_negativity(v: &CovarianceMatrix) -> Result<f64> {
    v.require_two_mode()?;
    if v.matrix().determinant() < 0.0 {
        return Err(Error::UnphysicalState { nu_min: f64::NAN });
    }
    check_physical(v)?;
    let eta = partial_transpose_eta(v)?;
    Ok((-(2.0 * eta).ln()).max(0.0))
}

/// tr ρ² = 1/(2^m √det V) for m modes.
pub fn purity(v: &CovarianceMatrix) -> Result<f64> {
    let det = v.matrix().determinant();
    if !(det > 0.0) {
        return Err(Error::UnphysicalState { nu_min: f64::NAN });
    }
    check_physical(v)?;
    let modes = (v.dim() / 2) as i32;
    Ok(1.0 / (2.0.powi(modes) * det.sqrt()))
}

/// Occupations of β₁ = cosh r·a + sinh r·b† and β₂ = cosh r·b + sinh r·a†.
pub fn bogoliubov_occupations(v: &CovarianceMatrix, r: f64) -> Result<(f64, f64)> {
    v.require_two_mode()?;
    let m = v.matrix();
    let (ch, sh) = (r.cosh(), r.sinh());
    let sa = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let sb = 0.5 * (m[(2, 2)] + m[(3, 3)]);
    let cross = m[(0, 2)] - m[(1, 3)];
    let n1 = ch * ch * (sa - 0.5) + sh * sh * (sb + 0.5) + ch * sh * cross;
    let n2 = ch * ch * (sb - 0.5) + sh * sh * (sa + 0.5) + ch * sh * cross;
    Ok((n1, n2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TtmssFit {
    pub xi: f64,
    pub nth_a: f64,
    pub nth_b: f64,
    /// Frobenius norm of V minus the reconstructed TTMSS covariance.
    pub residual: f64,
}

pub fn fit_ttmss(v: &CovarianceMatrix) -> Result<TtmssFit> {
    v.require_two_mode()?;
    let m = v.matrix();
    let ca = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let cb = 0.5 * (m[(2, 2)] + m[(3, 3)]);
    let cab = 0.5 * (m[(1, 3)] - m[(0, 2)]);
    if 2.0 * cab.abs() >= ca + cb {
        return Err(Error::NotTTMSSLike);
    }
    let xi = 0.5 * (2.0 * cab / (ca + cb)).atanh();
    let total = ((ca + cb).powi(2) - 4.0 * cab * cab).sqrt() - 1.0;
    let diff = ca - cb;
    let nth_a = 0.5 * (total + diff);
    let nth_b = 0.5 * (total - diff);
    let residual = (m - ttmss_covariance(xi, nth_a, nth_b).matrix()).norm();
    Ok(TtmssFit { xi, nth_a, nth_b, residual })
}

/// F = 1/√det(2V_in + N) with N = σ_z V_a σ_z + σ_z V_ab + V_abᵀ σ_z + V_b.
pub fn teleportation_fidelity(v: &CovarianceMatrix, v_in: &Matrix2<f64>) -> Result<f64> {
    v.require_two_mode()?;
    let sz = Matrix2::new(1.0, 0.0, 0.0, -1.0);
    let (va, vb, vab) = (v.block(0, 0), v.block(2, 2), v.block(0, 2));
    let n = sz * va * sz + sz * vab + vab.transpose() * sz + vb;
    let det = (v_in * 2.0 + n).determinant();
    if !(det > 0.0) {
        return Err(Error::UnphysicalState { nu_min: f64::NAN });
    }
    Ok(1.0 / det.sqrt())
}

pub fn coherent_input() -> Matrix2<f64> {
    Matrix2::identity() * 0.5
}

pub fn fidelity_ttmss(fit: &TtmssFit) -> f64 {
    1.0 / ((-2.0 * fit.xi).exp() * (1.0 + fit.nth_a + fit.nth_b + (2.0 * fit.xi).exp()))
}

pub fn fidelity_from_logneg(e_n: f64) -> f64 {
    1.0 / (1.0 + (-e_n).exp())
}
