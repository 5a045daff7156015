//! Cavity output spectrum and the spectrum-based entanglement bound.
//!
//! Frequency-domain response `x[ν] = −(A + iν)⁻¹ B x_in` of the mode-operator
//! system, output `c_out = c_in + √κ c`, and
//! `S[ω] = Σ_m n̄_m |τ_m(ω)|² + (n̄_m + 1) |τ_{m†}(ω)|²` with `τ` the `c_out`
//! row evaluated at `ν = ω`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 methods take over when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::model::{build_mode_operator, EffectiveModel};
use crate::numerics::{integrate_1d_vec, stability_report_complex, QuadOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumTrace {
    pub omega: Vec<f64>,
    pub values: Vec<f64>,
}

struct Evaluator {
    a: DMatrix<Complex64>,
    b: DMatrix<Complex64>,
    weights: [(f64, f64); 3],
    sqrt_kappa: f64,
}

impl Evaluator {
    fn new(model: &EffectiveModel) -> Result<Self> {
        model.validate()?;
        let drift = build_mode_operator(model);
        let report = stability_report_complex(&drift.a0)?;
        if !report.is_stable {
            return Err(Error::UnstableDrift { abscissa: report.spectral_abscissa });
        }
        Ok(Evaluator {
            a: drift.a0,
            b: drift.b0,
            weights: [(model.nbar_a, model.nbar_a + 1.0), (model.nbar_b, model.nbar_b + 1.0), (model.nbar_c, model.nbar_c + 1.0)],
            sqrt_kappa: model.kappa.sqrt(),
        })
    }

    fn eval(&self, omega: f64) -> Result<f64> {
        let mut r = self.a.clone();
        for i in 0..6 {
            r[(i, i)] += Complex64::new(0.0, omega);
        }
        let m = r.lu().solve(&self.b).ok_or(Error::SingularSystem)?;
        let mut s = 0.0;
        for (mode, (w_ann, w_cre)) in self.weights.iter().enumerate() {
            let j = 2 * mode;
            let mut t_ann = -m[(4, j)] * self.sqrt_kappa;
            let t_cre = -m[(4, j + 1)] * self.sqrt_kappa;
            if mode == 2 {
                t_ann += Complex64::new(1.0, 0.0);
            }
            s += w_ann * t_ann.norm_sqr() + w_cre * t_cre.norm_sqr();
        }
        Ok(s)
    }
}

pub fn output_spectrum(model: &EffectiveModel, grid: &[f64]) -> Result<SpectrumTrace> {
    let ev = Evaluator::new(model)?;
    let values = grid.iter().map(|&w| ev.eval(w)).collect::<Result<Vec<_>>>()?;
    Ok(SpectrumTrace { omega: grid.to_vec(), values })
}

/// Single-frequency evaluation of [`output_spectrum`].
pub fn output_spectrum_at(model: &EffectiveModel, omega: f64) -> Result<f64> {
    Evaluator::new(model)?.eval(omega)
}

/// 2001 points over [−L, L], L = max(8Ω, Ω + 6(γ + Γ)).
pub fn default_grid(model: &EffectiveModel) -> Vec<f64> {
    let width = model.gamma_mean() + model.big_gamma().max(0.0);
    let half = (8.0 * model.omega.abs()).max(model.omega.abs() + 6.0 * width);
    let n = 2001;
    (0..n).map(|i| -half + 2.0 * half * i as f64 / (n - 1) as f64).collect()
}

/// Closed form for Gᵐ± = 0 and γ/Ω → 0 (coupling imperfections are ignored;
/// γ is the mean mechanical damping, n̄ the mean occupation).
pub fn spectrum_closed_form(model: &EffectiveModel, omega: f64) -> f64 {
    let (gp, gm, k, w0) = (model.g_plus, model.g_minus, model.kappa, model.omega);
    let g = model.gamma_mean();
    let n = 0.5 * (model.nbar_a + model.nbar_b);
    let s2 = gm * gm - gp * gp;
    let gw = Complex64::new(g, -2.0 * omega);
    let kw = Complex64::new(k, -2.0 * omega);
    let den = (gw * kw + 8.0 * s2) * gw + kw * (4.0 * w0 * w0);
    k * 32.0 * (gm * gm * n + gp * gp * (n + 1.0)) * g * (g * g + 4.0 * (omega * omega + w0 * w0)) / den.norm_sqr()
}

/// Peak heights (S[+Ω], S[−Ω]) including coupling imperfections.
pub fn peak_values(model: &EffectiveModel) -> Result<(f64, f64)> {
    let (gp, gm, mp, mm, k) = (model.g_plus, model.g_minus, model.gm_plus, model.gm_minus, model.kappa);
    let g = model.gamma_mean();
    let n = 0.5 * (model.nbar_a + model.nbar_b);
    let bracket = gm * gm - mm * mm - gp * gp + mp * mp;
    if bracket.abs() <= 1e-14 * (gm * gm + gp * gp).max(f64::MIN_POSITIVE) {
        return Err(Error::DegenerateDenominator);
    }
    let peak = |s: f64| g * k * ((gm + s * mm).powi(2) * n + (gp + s * mp).powi(2) * (1.0 + n)) / (bracket * bracket);
    Ok((peak(1.0), peak(-1.0)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOccupation {
    pub n_beta_from_area: f64,
    pub n_beta_from_peak: f64,
    /// True when |Gᵐ±/G±| exceeds 1%, outside the inversion's validity.
    pub imperfection_warning: bool,
}

fn invert(area_negative: f64, peak: f64, model: &EffectiveModel) -> Result<SpectralOccupation> {
    let (gp, gm, k) = (model.g_plus, model.g_minus, model.kappa);
    let g = model.gamma_mean();
    let s2 = gm * gm - gp * gp;
    let (from_area, from_peak) = if s2 > 0.0 {
        (area_negative * (4.0 * s2 + k * (k + g)) / (8.0 * core::f64::consts::PI * k * s2), peak * s2 / (g * k + 4.0 * s2))
    } else {
        (0.0, 0.0)
    };
    for v in [from_area, from_peak] {
        if v < -1e-6 {
            return Err(Error::NegativeOccupation { value: v });
        }
    }
    let ratio = |m: f64, g: f64| {
        if g == 0.0 {
            if m == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (m / g).abs()
        }
    };
    let imperfection_warning = ratio(model.gm_plus, gp) > 0.01 || ratio(model.gm_minus, gm) > 0.01;
    Ok(SpectralOccupation { n_beta_from_area: from_area, n_beta_from_peak: from_peak, imperfection_warning })
}

fn interpolate(trace: &SpectrumTrace, w: f64) -> Option<f64> {
    let i = trace.omega.windows(2).position(|p| p[0] <= w && w <= p[1])?;
    let (x0, x1) = (trace.omega[i], trace.omega[i + 1]);
    let (y0, y1) = (trace.values[i], trace.values[i + 1]);
    Some(if x1 == x0 { y0 } else { y0 + (y1 - y0) * (w - x0) / (x1 - x0) })
}

/// Inverts peak area (trapezoid over the sampled ω < 0 half) and the mean
/// of the interpolated heights at ±Ω into Bogoliubov occupations.
pub fn occupation_from_spectrum(trace: &SpectrumTrace, model: &EffectiveModel) -> Result<SpectralOccupation> {
    if trace.omega.len() != trace.values.len() || trace.omega.len() < 2 {
        return Err(Error::DimensionMismatch { expected: trace.omega.len(), got: trace.values.len() });
    }
    let mut area = 0.0;
    for i in 0..trace.omega.len() - 1 {
        let (x0, x1) = (trace.omega[i], trace.omega[i + 1].min(0.0));
        if x0 >= 0.0 {
            break;
        }
        let y1 = if trace.omega[i + 1] > 0.0 { interpolate(trace, 0.0).unwrap_or(trace.values[i + 1]) } else { trace.values[i + 1] };
        area += 0.5 * (x1 - x0) * (trace.values[i] + y1);
    }
    let w = model.omega;
    let peak = match (interpolate(trace, w), interpolate(trace, -w)) {
        (Some(a), Some(b)) => 0.5 * (a + b),
        _ => return Err(Error::InvalidParameter { name: "trace", reason: "grid does not cover ±Omega" }),
    };
    invert(area, peak, model)
}

/// Same inversion from the model directly: adaptive quadrature of the
/// numerical spectrum over ω < 0 and exact evaluation at ±Ω.
pub fn occupation_from_model_spectrum(model: &EffectiveModel, tol: f64) -> Result<SpectralOccupation> {
    let ev = Evaluator::new(model)?;
    let area = half_area(&ev, model, -1.0, tol)?;
    let peak = 0.5 * (ev.eval(model.omega)? + ev.eval(-model.omega)?);
    invert(area, peak, model)
}

/// ∫ S dω over ω < 0 (`side = -1`) or ω > 0 (`side = +1`).
fn half_area(ev: &Evaluator, model: &EffectiveModel, side: f64, tol: f64) -> Result<f64> {
    let w0 = model.omega.abs();
    let width = (model.gamma_mean() + model.big_gamma().max(0.0)).max(1e-12);
    let far = (w0 + 10.0 * model.kappa).max(4.0 * w0);
    let mut pts: Vec<f64> = vec![0.0, far, f64::INFINITY];
    for s in [-64.0, -16.0, -4.0, -1.0, 0.0, 1.0, 4.0, 16.0, 64.0] {
        let p = w0 + s * width;
        if p > 0.0 && p < far {
            pts.push(p);
        }
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    let mut err = None;
    let opts = QuadOptions { abs_tol: 0.0, rel_tol: tol, max_intervals: 50_000 };
    let q = integrate_1d_vec(
        |w, out: &mut [f64]| match ev.eval(side * w) {
            Ok(v) => out[0] = v,
            Err(e) => err = Some(e),
        },
        1,
        &pts,
        &opts,
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(q.values[0])
}

/// ∫_{−∞}^{0} S dω of the numerical spectrum.
pub fn spectrum_area_negative(model: &EffectiveModel, tol: f64) -> Result<f64> {
    half_area(&Evaluator::new(model)?, model, -1.0, tol)
}

/// ∫_{0}^{∞} S dω of the numerical spectrum.
pub fn spectrum_area_positive(model: &EffectiveModel, tol: f64) -> Result<f64> {
    half_area(&Evaluator::new(model)?, model, 1.0, tol)
}

/// Upper bound 8e^{−2r}(n_β + ½) on ⟨X₊²⟩ + ⟨P₋²⟩ for equal Bogoliubov occupations.
pub fn duan_bound(n_beta: f64, r: f64) -> f64 {
    8.0 * (-2.0 * r).exp() * (n_beta + 0.5)
}
