use nalgebra::ComplexField;
use num_complex::Complex64;

use super::{complex_schur, hermitize, is_finite_complex, is_finite_real, stability_report, symmetrize, CMatrix, RMatrix, StabilityReport};
use crate::error::{Error, Result};

/// Frobenius norm of `A V + V Aᵀ + Q`.
pub fn lyapunov_residual(a: &RMatrix, v: &RMatrix, q: &RMatrix) -> f64 {
    (a * v + v * a.transpose() + q).norm()
}

fn check_square_pair(n: usize, rows: usize, cols: usize) -> Result<()> {
    if rows != n || cols != n {
        return Err(Error::DimensionMismatch { expected: n, got: if rows != n { rows } else { cols } });
    }
    Ok(())
}

/// Solves `A V + V Aᵀ = −Q` for real `A` by vectorizing into an n²×n² system.
pub fn solve_lyapunov(a: &RMatrix, q: &RMatrix) -> Result<RMatrix> {
    let n = a.nrows();
    check_square_pair(n, a.nrows(), a.ncols())?;
    check_square_pair(n, q.nrows(), q.ncols())?;
    if n == 0 {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    if !is_finite_real(a) || !is_finite_real(q) {
        return Err(Error::NonFinite);
    }
    let report = stability_report(a)?;
    if !report.is_stable {
        return Err(Error::UnstableDrift { abscissa: report.spectral_abscissa });
    }
    let q = symmetrize(q);

    let m = n * n;
    let mut k = RMatrix::zeros(m, m);
    for j in 0..n {
        for i in 0..n {
            let row = i + n * j;
            for l in 0..n {
                k[(row, l + n * j)] += a[(i, l)];
                k[(row, i + n * l)] += a[(j, l)];
            }
        }
    }
    let rhs = nalgebra::DVector::from_iterator(m, q.iter().map(|x| -x));
    let lu = k.clone().lu();
    let mut x = lu.solve(&rhs).ok_or(Error::SingularSystem)?;
    // one step of iterative refinement
    let r = &rhs - &k * &x;
    if let Some(dx) = lu.solve(&r) {
        x += dx;
    }
    if !x.iter().all(|v| v.is_finite()) {
        return Err(Error::SingularSystem);
    }
    let v = RMatrix::from_column_slice(n, n, x.as_slice());
    Ok(symmetrize(&v))
}

/// Solves `A V + V A† = −Q` for complex `A` via a complex Schur form
/// (Bartels–Stewart with a triangular back-substitution per column).
pub fn solve_lyapunov_complex(a: &CMatrix, q: &CMatrix) -> Result<CMatrix> {
    let n = a.nrows();
    check_square_pair(n, a.nrows(), a.ncols())?;
    check_square_pair(n, q.nrows(), q.ncols())?;
    if n == 0 {
        return Err(Error::DimensionMismatch { expected: 1, got: 0 });
    }
    if !is_finite_complex(a) || !is_finite_complex(q) {
        return Err(Error::NonFinite);
    }
    let (u, t) = complex_schur(a)?;
    let abscissa = t.diagonal().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let norm = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let report = StabilityReport::from_abscissa(abscissa, norm);
    if !report.is_stable {
        return Err(Error::UnstableDrift { abscissa });
    }

    let f = u.adjoint() * hermitize(q) * &u;
    let mut y = CMatrix::zeros(n, n);
    for j in (0..n).rev() {
        let mut rhs: nalgebra::DVector<Complex64> = -f.column(j);
        for kk in (j + 1)..n {
            let c = t[(j, kk)].conj();
            if c != Complex64::new(0.0, 0.0) {
                rhs -= y.column(kk) * c;
            }
        }
        let shift = t[(j, j)].conj();
        for i in (0..n).rev() {
            let mut s = rhs[i];
            for kk in (i + 1)..n {
                s -= t[(i, kk)] * y[(kk, j)];
            }
            let d = t[(i, i)] + shift;
            if d.modulus() == 0.0 {
                return Err(Error::SingularSystem);
            }
            y[(i, j)] = s / d;
        }
    }
    let v = &u * y * u.adjoint();
    if !is_finite_complex(&v) {
        return Err(Error::SingularSystem);
    }
    Ok(hermitize(&v))
}
