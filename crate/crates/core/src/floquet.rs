//! DC covariance of the time-periodic drift `A(t) = A₀ + Σₖ Aₖ₊e^{2iδₖt} + Aₖ₋e^{−2iδₖt}`.
//!
//! The harmonic ansatz couples the frequency components `x[ω]` and
//! `x[ω ∓ 2δₖ]`. Blocks are ordered by `m = N, …, 1, 0, −1, …, −N`, block `m`
//! carrying the shift `sign(m)·δ_|m|`; the central block (`m = 0`) couples to
//! `m = ±k` through `Aₖ±` and those blocks couple back through `Aₖ∓`. Only the
//! bare frequencies `δₖ` are kept (no sum/difference harmonics).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 methods take over when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::gaussian::{duan_quantity, CovarianceMatrix};
use crate::model::{build_cr_harmonics_with, build_rwa_quadrature, Basis, CounterRotating, DriftSet, EffectiveModel};
use crate::numerics::{
    complex_schur, integrate_1d_vec, integrate_lyapunov_ode_with, solve_lyapunov, solve_lyapunov_complex, stability_report, symmetrize,
    CMatrix, OdeOptions, QuadOptions, RMatrix, StabilityReport,
};

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicCovariance {
    pub delta: f64,
    /// Coefficient of e^{2iδt} in V(t).
    pub plus: CMatrix,
    pub minus: CMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FloquetSolution {
    pub v0: RMatrix,
    pub harmonics_out: Option<Vec<HarmonicCovariance>>,
    pub integration_error: f64,
    /// Largest |Im| entry of the integrated DC block before taking the real part.
    pub imaginary_residue: f64,
    /// Largest |V − Vᵀ| entry before symmetrization.
    pub asymmetry: f64,
    pub stability: StabilityReport,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct FloquetOptions {
    /// Relative quadrature tolerance.
    pub tol: f64,
    pub harmonics_out: bool,
}

impl Default for FloquetOptions {
    fn default() -> Self {
        FloquetOptions { tol: 1e-9, harmonics_out: false }
    }
}

/// Enlarged constant generator (2N+1 blocks) and its block-diagonal diffusion.
pub struct EnlargedSystem {
    pub generator: CMatrix,
    pub diffusion: CMatrix,
    pub block: usize,
    pub center: usize,
    pub shifts: Vec<f64>,
}

fn block_shift(m: isize, deltas: &[f64]) -> f64 {
    match m {
        0 => 0.0,
        m if m > 0 => deltas[m as usize - 1],
        m => -deltas[(-m) as usize - 1],
    }
}

pub fn enlarged_system(drift: &DriftSet) -> Result<EnlargedSystem> {
    if drift.basis != Basis::Quadrature {
        return Err(Error::InvalidParameter { name: "drift", reason: "harmonic balance expects the quadrature basis" });
    }
    let n = drift.dim();
    let nh = drift.harmonics.len();
    let blocks = 2 * nh + 1;
    let deltas: Vec<f64> = drift.harmonics.iter().map(|h| h.delta).collect();
    let index = |m: isize| (nh as isize - m) as usize;
    let d = drift.diffusion();
    let mut g = CMatrix::zeros(n * blocks, n * blocks);
    let mut dd = CMatrix::zeros(n * blocks, n * blocks);
    let mut shifts = Vec::with_capacity(blocks);
    for j in 0..blocks {
        let m = nh as isize - j as isize;
        let s = block_shift(m, &deltas);
        shifts.push(s);
        let o = j * n;
        g.view_mut((o, o), (n, n)).copy_from(&drift.a0);
        for i in 0..n {
            g[(o + i, o + i)] += Complex64::new(0.0, 2.0 * s);
        }
        dd.view_mut((o, o), (n, n)).copy_from(&d);
    }
    let c = index(0) * n;
    for (k, h) in drift.harmonics.iter().enumerate() {
        let k = k as isize + 1;
        let (p, q) = (index(k) * n, index(-k) * n);
        g.view_mut((c, p), (n, n)).copy_from(&h.plus);
        g.view_mut((c, q), (n, n)).copy_from(&h.minus);
        g.view_mut((p, c), (n, n)).copy_from(&h.minus);
        g.view_mut((q, c), (n, n)).copy_from(&h.plus);
    }
    Ok(EnlargedSystem { generator: g, diffusion: dd, block: n, center: index(0), shifts })
}

fn frequency_breakpoints(eigs: &[Complex64], cutoff: f64) -> Vec<f64> {
    let mut pts = vec![f64::NEG_INFINITY, -cutoff, cutoff, f64::INFINITY];
    for z in eigs {
        let centre = -z.im;
        let w = z.re.abs().max(1e-14);
        for s in [-64.0, -16.0, -4.0, -1.0, 0.0, 1.0, 4.0, 16.0, 64.0] {
            let p = centre + s * w;
            if p > -cutoff && p < cutoff {
                pts.push(p);
            }
        }
    }
    pts.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(pts.len());
    for p in pts {
        match out.last() {
            Some(&q) if p.is_finite() && (p - q).abs() <= 1e-12 * p.abs().max(1.0) => {}
            _ => out.push(p),
        }
    }
    out
}

/// DC covariance by integrating the central block of `Ā⁻¹[ω] 𝐃 Ā⁻†[ω]`,
/// `Ā[ω] = 𝔸 + iω`, over all frequencies and dividing by 2π.
pub fn solve_floquet(drift: &DriftSet, opts: &FloquetOptions) -> Result<FloquetSolution> {
    let sys = enlarged_system(drift)?;
    let (u, t) = complex_schur(&sys.generator)?;
    drop(u);
    let eigs: Vec<Complex64> = t.diagonal().iter().copied().collect();
    let abscissa = eigs.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let norm = sys.generator.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let stability = StabilityReport { spectral_abscissa: abscissa, is_stable: abscissa < -1e-12 * norm };
    if !stability.is_stable {
        return Err(Error::UnstableDrift { abscissa });
    }

    let n = sys.block;
    let nk = sys.generator.nrows();
    let c = sys.center * n;
    let max_delta = sys.shifts.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    let max_eig = eigs.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    let cutoff = (20.0 * drift.a0[(n - 1, n - 1)].re.abs().max(1.0)).max(4.0 * max_delta).max(2.0 * max_eig);
    let pts = frequency_breakpoints(&eigs, cutoff);

    let want: Vec<usize> = if opts.harmonics_out { (0..sys.shifts.len()).collect() } else { vec![sys.center] };
    let nblocks = want.len();
    let dim = 2 * n * n * nblocks;
    let mut failure = None;
    let integrand = |w: f64, out: &mut [f64]| {
        let mut r = sys.generator.adjoint();
        for i in 0..nk {
            r[(i, i)] -= Complex64::new(0.0, w);
        }
        // Z = Ā⁻† E_c so that the central block row of Ā⁻¹ is Z†
        let mut rhs = CMatrix::zeros(nk, n);
        for i in 0..n {
            rhs[(c + i, i)] = Complex64::new(1.0, 0.0);
        }
        let Some(z) = r.clone().lu().solve(&rhs) else {
            failure = Some(Error::SingularSystem);
            return;
        };
        let dz = &sys.diffusion * &z;
        if nblocks == 1 {
            let v = z.adjoint() * dz;
            for (i, e) in v.iter().enumerate() {
                out[2 * i] = e.re;
                out[2 * i + 1] = e.im;
            }
            return;
        }
        // rows of Ā⁻¹ for every block: need the full inverse
        let Some(inv) = r.lu().try_inverse() else {
            failure = Some(Error::SingularSystem);
            return;
        };
        let full_rows = inv.adjoint();
        for (b, &j) in want.iter().enumerate() {
            let rows = full_rows.view((j * n, 0), (n, nk));
            let v = (z.adjoint() * &sys.diffusion) * rows.adjoint();
            for (i, e) in v.iter().enumerate() {
                out[2 * n * n * b + 2 * i] = e.re;
                out[2 * n * n * b + 2 * i + 1] = e.im;
            }
        }
    };
    let qopts = QuadOptions { abs_tol: 1e-300, rel_tol: opts.tol, max_intervals: 200_000 };
    let q = integrate_1d_vec(integrand, dim, &pts, &qopts)?;
    if let Some(e) = failure {
        return Err(e);
    }
    let scale = 1.0 / (2.0 * PI);
    let block = |b: usize| {
        CMatrix::from_fn(n, n, |i, j| {
            let k = 2 * n * n * b + 2 * (i + n * j);
            Complex64::new(q.values[k], q.values[k + 1]) * scale
        })
    };
    let centre_idx = want.iter().position(|&j| j == sys.center).unwrap_or(0);
    let v0c = block(centre_idx);
    let imaginary_residue = v0c.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
    let re = v0c.map(|z| z.re);
    let asymmetry = (&re - re.transpose()).iter().fold(0.0f64, |m, x| m.max(x.abs()));

    let harmonics_out = if opts.harmonics_out {
        let nh = drift.harmonics.len();
        Some(
            drift
                .harmonics
                .iter()
                .enumerate()
                .map(|(k, h)| {
                    let kk = k + 1;
                    let plus_idx = want.iter().position(|&j| j == nh - kk).unwrap();
                    let minus_idx = want.iter().position(|&j| j == nh + kk).unwrap();
                    HarmonicCovariance { delta: h.delta, plus: block(plus_idx), minus: block(minus_idx) }
                })
                .collect(),
        )
    } else {
        None
    };

    Ok(FloquetSolution {
        v0: symmetrize(&re),
        harmonics_out,
        integration_error: q.error * scale,
        imaginary_residue,
        asymmetry,
        stability,
        evaluations: q.evaluations,
    })
}

/// DC covariance from the algebraic Lyapunov equation of the enlarged
/// generator, `𝔸W + W𝔸† + 𝐃 = 0`, central block.
pub fn solve_floquet_algebraic(drift: &DriftSet) -> Result<RMatrix> {
    let sys = enlarged_system(drift)?;
    let w = solve_lyapunov_complex(&sys.generator, &sys.diffusion)?;
    let n = sys.block;
    let c = sys.center * n;
    Ok(symmetrize(&w.view((c, c), (n, n)).map(|z| z.re)))
}

/// Time-averaged covariance from direct integration of `V̇ = A(t)V + VA(t)ᵀ + D`
/// starting from the vacuum. `horizon` defaults to `10/|abscissa(A₀)|`; the
/// average covers 20 periods of the slowest harmonic after the horizon.
pub fn dc_covariance_by_ode(drift: &DriftSet, horizon: Option<f64>, tol: f64) -> Result<RMatrix> {
    if drift.basis != Basis::Quadrature {
        return Err(Error::InvalidParameter { name: "drift", reason: "ODE oracle expects the quadrature basis" });
    }
    let a0 = drift.a0_real();
    let d = drift.diffusion_real();
    let rep = stability_report(&a0)?;
    if !rep.is_stable {
        return Err(Error::UnstableDrift { abscissa: rep.spectral_abscissa });
    }
    if drift.harmonics.is_empty() {
        return solve_lyapunov(&a0, &d);
    }
    let settle = horizon.unwrap_or(10.0 / rep.spectral_abscissa.abs());
    let slow = drift.harmonics.iter().map(|h| h.delta.abs()).fold(f64::INFINITY, f64::min);
    let fast = drift.harmonics.iter().map(|h| h.delta.abs()).fold(0.0, f64::max);
    let window = 20.0 * PI / slow;
    let t_end = settle + window;
    let opts = OdeOptions { tol, h_max: PI / fast / 32.0, ..OdeOptions::default() };

    let n = drift.dim();
    let mut acc = RMatrix::zeros(n, n);
    let mut prev: Option<(f64, RMatrix)> = None;
    let tail_start = t_end - 0.2 * (t_end - settle).max(settle);
    // envelope of max |V| over 4 tail windows, each at least a period of the slowest harmonic
    let probes = 4;
    let probe_len = (t_end - tail_start) / probes as f64;
    let mut envelope = [0.0f64; 4];
    let v_init = RMatrix::identity(n, n) * 0.5;
    let start_norm = v_init.amax();
    let mut peak = start_norm;
    let run = integrate_lyapunov_ode_with(
        |t| drift.drift_at(t),
        &d,
        &v_init,
        t_end,
        &opts,
        |t, v| {
            let norm = v.amax();
            peak = peak.max(norm);
            if t >= tail_start {
                let k = (((t - tail_start) / probe_len) as usize).min(probes - 1);
                envelope[k] = envelope[k].max(norm);
            }
            if let Some((t0, v0)) = &prev {
                let lo = t0.max(settle);
                if t > lo {
                    // trapezoid on the part of the step inside the window
                    let frac0 = (lo - t0) / (t - t0);
                    let v_lo = v0 + (v - v0) * frac0;
                    acc += (&v_lo + v) * (0.5 * (t - lo));
                }
            }
            prev = Some((t, v.clone()));
        },
    );
    if let Err(e) = run {
        // a runaway solution ends in step-size collapse or overflow
        return Err(if peak > 1e10 * start_norm { Error::UnstableDrift { abscissa: f64::NAN } } else { e });
    }
    let growing = envelope.windows(2).all(|w| w[1] > w[0]) && envelope[probes - 1] > 1.001 * envelope[0];
    if growing || !envelope[probes - 1].is_finite() || !acc.iter().all(|x| x.is_finite()) {
        return Err(Error::UnstableDrift { abscissa: f64::NAN });
    }
    Ok(symmetrize(&(acc / window)))
}

/// Drive family for cooperativity sweeps (units of κ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CooperativityFamily {
    pub omega: f64,
    pub gamma: f64,
    pub nbar: f64,
    pub gm_ratio: f64,
}

impl CooperativityFamily {
    pub fn model(&self, asymmetry: f64, c_minus: f64) -> Result<EffectiveModel> {
        EffectiveModel::from_ratios(asymmetry, c_minus, self.gm_ratio, self.omega, self.gamma, self.nbar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CooperativityPoint {
    pub c_minus: f64,
    pub asymmetry: f64,
    pub duan: f64,
    /// −log₁₀(Duan / Duan_vacuum) with Duan_vacuum = 1.
    pub tms_db: f64,
}

/// Duan quantity of the steady state; `sideband_resolution = None` is the
/// RWA, otherwise two-tone counter-rotating terms at ω_m are included.
pub fn duan_for(model: &EffectiveModel, sideband_resolution: Option<f64>, tol: f64) -> Result<f64> {
    let v = match sideband_resolution {
        None => {
            let d = build_rwa_quadrature(model);
            solve_lyapunov(&d.a0_real(), &d.diffusion_real())?
        }
        Some(wm) => {
            let d = build_cr_harmonics_with(model, &CounterRotating::TwoTone { omega_m: wm });
            solve_floquet(&d, &FloquetOptions { tol, harmonics_out: false })?.v0
        }
    };
    duan_quantity(&CovarianceMatrix::new(v.view((0, 0), (4, 4)).into_owned())?)
}

/// Golden-section minimization of `f` on `[lo, hi]` until the bracket is
/// narrower than `tol`. Non-finite values count as +∞.
pub fn golden_section<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    let clean = |y: f64| if y.is_finite() { y } else { f64::INFINITY };
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - phi * (b - a);
    let mut x2 = a + phi * (b - a);
    let mut f1 = clean(f(x1));
    let mut f2 = clean(f(x2));
    while b - a > tol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = clean(f(x1));
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = clean(f(x2));
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// For each C₋, minimizes the Duan quantity over G₊/G₋ ∈ [0, 1) to `x_tol`.
pub fn sweep_cooperativity_floquet(
    family: &CooperativityFamily,
    sideband_resolution: Option<f64>,
    c_values: &[f64],
    x_tol: f64,
    tol: f64,
) -> Result<Vec<CooperativityPoint>> {
    let mut out = Vec::with_capacity(c_values.len());
    for &cm in c_values {
        let mut last_err = None;
        let (x, duan) = golden_section(
            |x| match family.model(x, cm).and_then(|m| duan_for(&m, sideband_resolution, tol)) {
                Ok(v) => v,
                Err(e) => {
                    last_err = Some(e);
                    f64::INFINITY
                }
            },
            0.0,
            1.0 - 1e-9,
            x_tol,
        );
        if !duan.is_finite() {
            return Err(last_err.unwrap_or(Error::NonConvergent { what: "asymmetry minimization" }));
        }
        out.push(CooperativityPoint { c_minus: cm, asymmetry: x, duan, tms_db: -duan.log10() });
    }
    Ok(out)
}
