use alloc::vec::Vec;

#[allow(unused_imports)] // inherent f64 methods take over when std is linked
use num_traits::Float;

use super::{symmetrize, RMatrix};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    /// Mixed absolute/relative local error target.
    pub tol: f64,
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { tol: 1e-8, h_init: None, h_max: f64::INFINITY, max_steps: 50_000_000 }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0];

fn rhs(a: &RMatrix, v: &RMatrix, q: &RMatrix) -> RMatrix {
    let av = a * v;
    &av + av.transpose() + q
}

fn error_norm(y: &RMatrix, y_new: &RMatrix, err: &RMatrix, tol: f64) -> f64 {
    let mut s = 0.0;
    for ((e, a), b) in err.iter().zip(y.iter()).zip(y_new.iter()) {
        let sc = tol + tol * a.abs().max(b.abs());
        s += (e / sc) * (e / sc);
    }
    (s / err.len() as f64).sqrt()
}

/// Integrates `V̇ = A(t) V + V A(t)ᵀ + Q` from `V(0) = v_init` to `t_end`,
/// calling `observe(t, V)` at t = 0 and after every accepted step.
pub fn integrate_lyapunov_ode_with<F, O>(
    mut a_of_t: F,
    q: &RMatrix,
    v_init: &RMatrix,
    t_end: f64,
    opts: &OdeOptions,
    mut observe: O,
) -> Result<(RMatrix, OdeStats)>
where
    F: FnMut(f64) -> RMatrix,
    O: FnMut(f64, &RMatrix),
{
    let n = v_init.nrows();
    if !v_init.is_square() || q.nrows() != n || q.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: q.nrows() });
    }
    if !(t_end >= 0.0) || !(opts.tol > 0.0) {
        return Err(Error::InvalidParameter { name: "t_end/tol", reason: "must be non-negative/positive" });
    }
    let tol = opts.tol;
    let mut stats = OdeStats::default();
    let mut t = 0.0;
    let mut v = symmetrize(v_init);
    observe(t, &v);
    if t_end == 0.0 {
        return Ok((v, stats));
    }

    let a0 = a_of_t(0.0);
    if a0.nrows() != n || a0.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, got: a0.nrows() });
    }
    let mut k1 = rhs(&a0, &v, q);
    let mut h = match opts.h_init {
        Some(h) => h,
        None => {
            let d0 = error_norm(&v, &v, &v, tol);
            let d1 = error_norm(&v, &v, &k1, tol);
            if d0 < 1e-5 || d1 < 1e-5 {
                1e-6
            } else {
                0.01 * d0 / d1
            }
        }
    }
    .min(opts.h_max)
    .min(t_end);
    let mut err_old: f64 = 1e-4;
    let mut rejected_last = false;

    let mut k: Vec<RMatrix> = Vec::with_capacity(7);
    while t < t_end {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::NonConvergent { what: "ODE integration (step budget)" });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        if h <= 16.0 * f64::EPSILON * t.abs().max(1e-300) {
            return Err(Error::StepSizeUnderflow { t });
        }

        k.clear();
        k.push(k1.clone());
        for s in 1..7 {
            let mut y = v.clone();
            for (j, kj) in k.iter().enumerate() {
                let c = A[s][j];
                if c != 0.0 {
                    y += kj * (h * c);
                }
            }
            let a = a_of_t(t + C[s] * h);
            if s == 6 {
                // stage 7 is evaluated at the 5th-order solution
                let ks = rhs(&a, &y, q);
                k.push(ks);
                break;
            }
            k.push(rhs(&a, &y, q));
        }
        let mut y_new = v.clone();
        for (j, kj) in k.iter().take(6).enumerate() {
            let c = A[6][j];
            if c != 0.0 {
                y_new += kj * (h * c);
            }
        }
        let mut err_m = RMatrix::zeros(n, n);
        for (j, kj) in k.iter().enumerate() {
            if E[j] != 0.0 {
                err_m += kj * (h * E[j]);
            }
        }
        let err = error_norm(&v, &y_new, &err_m, tol);
        if !err.is_finite() {
            stats.rejected += 1;
            h *= 0.2;
            rejected_last = true;
            continue;
        }
        if err <= 1.0 {
            t = if last { t_end } else { t + h };
            v = symmetrize(&y_new);
            k1 = k[6].clone();
            stats.accepted += 1;
            observe(t, &v);
            let e = err.max(1e-10);
            let mut fac = 0.9 * e.powf(-0.17) * err_old.powf(0.04);
            fac = fac.clamp(0.2, 10.0);
            if rejected_last {
                fac = fac.min(1.0);
            }
            err_old = e;
            rejected_last = false;
            h = (h * fac).min(opts.h_max);
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).max(0.2);
            rejected_last = true;
        }
    }
    Ok((v, stats))
}

/// Trajectory of accepted steps of [`integrate_lyapunov_ode_with`].
pub fn integrate_lyapunov_ode<F>(a_of_t: F, q: &RMatrix, v_init: &RMatrix, t_end: f64, tol: f64) -> Result<Vec<(f64, RMatrix)>>
where
    F: FnMut(f64) -> RMatrix,
{
    let mut out = Vec::new();
    let opts = OdeOptions { tol, ..OdeOptions::default() };
    integrate_lyapunov_ode_with(a_of_t, q, v_init, t_end, &opts, |t, v| out.push((t, v.clone())))?;
    Ok(out)
}
