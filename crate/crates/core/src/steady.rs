//! Steady-state covariances of static drifts.

use alloc::vec;

use crate::error::Result;
use crate::gaussian::CovarianceMatrix;
use crate::model::{mode_covariance_to_quadrature, Basis, DriftSet};
use crate::numerics::{solve_lyapunov, solve_lyapunov_complex, RMatrix};

/// Solves the static Lyapunov equation of `drift` and returns the covariance
/// in the quadrature basis (collective basis for the adiabatic model).
pub fn steady_state(drift: &DriftSet) -> Result<CovarianceMatrix> {
    match drift.basis {
        Basis::Quadrature => CovarianceMatrix::new(solve_lyapunov(&drift.a0_real(), &drift.diffusion_real())?),
        Basis::ModeOperator => {
            let v = solve_lyapunov_complex(&drift.a0, &drift.diffusion())?;
            CovarianceMatrix::new(mode_covariance_to_quadrature(&v))
        }
        Basis::CollectiveAdiabatic => {
            let v = solve_lyapunov(&drift.a0_real(), &drift.diffusion_real())?;
            CovarianceMatrix::with_labels(v, vec!["X_+", "P_+", "X_-", "P_-"])
        }
    }
}

/// (X₊, P₊, X₋, P₋) covariance to (X_a, P_a, X_b, P_b).
pub fn collective_to_modes(v: &CovarianceMatrix) -> Result<CovarianceMatrix> {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    #[rustfmt::skip]
    let t = RMatrix::from_row_slice(4, 4, &[
        h, 0.0, h, 0.0,
        0.0, h, 0.0, h,
        h, 0.0, -h, 0.0,
        0.0, h, 0.0, -h,
    ]);
    CovarianceMatrix::new(&t * v.matrix() * t.transpose())
}
