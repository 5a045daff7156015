//! Closed-form steady state in the adiabatic, γ/Ω → 0 limit.

#[allow(unused_imports)] // inherent f64 methods take over when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;
use crate::model::EffectiveModel;
use crate::numerics::RMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticResult {
    pub x_plus_sq: f64,
    pub p_minus_sq: f64,
    pub x_minus_sq: f64,
    pub p_plus_sq: f64,
    pub n_beta: f64,
    pub mu: f64,
}

impl AdiabaticResult {
    pub fn duan(&self) -> f64 {
        self.x_plus_sq + self.p_minus_sq
    }
}

fn symmetric_params(model: &EffectiveModel) -> Result<(f64, f64)> {
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs());
    if !close(model.gamma_a, model.gamma_b) || !close(model.nbar_a, model.nbar_b) {
        return Err(Error::AsymmetricParams);
    }
    Ok((model.gamma_a, model.nbar_a))
}

/// Steady-state collective moments, Bogoliubov occupation and purity.
/// Uses the rational form in G±, which stays finite at G₊ = G₋.
pub fn collective_moments(model: &EffectiveModel) -> Result<AdiabaticResult> {
    let (g, n) = symmetric_params(model)?;
    let (gp, gm, k) = (model.g_plus, model.g_minus, model.kappa);
    let s = gm * gm - gp * gp;
    let den = g * k + 4.0 * s;
    let thermal = g * k / den * (n + 0.5);
    let x_plus_sq = thermal + 2.0 * (gm - gp).powi(2) / den;
    let x_minus_sq = thermal + 2.0 * (gm + gp).powi(2) / den;
    let n_beta = g * k / den * (gp * gp + n * (gm * gm + gp * gp)) / s;
    let big = model.big_gamma();
    let sh2 = if s > 0.0 { gp * gp / s } else { f64::INFINITY };
    let mu = (g + big).powi(2) / ((g * (1.0 + 2.0 * n) + big).powi(2) + 4.0 * (1.0 + 2.0 * n) * g * big * sh2);
    Ok(AdiabaticResult { x_plus_sq, p_minus_sq: x_plus_sq, x_minus_sq, p_plus_sq: x_minus_sq, n_beta, mu })
}

/// ⟨X₊²⟩ and ⟨X₋²⟩ written as a squeezed-bath mixture in γ, Γ and r.
pub fn collective_moments_bath_form(model: &EffectiveModel) -> Result<(f64, f64)> {
    let (g, n) = symmetric_params(model)?;
    let big = model.big_gamma();
    let r = model.r();
    let w = g / (g + big);
    let x_plus = w * (n + 0.5) + (1.0 - w) * (-2.0 * r).exp() / 2.0;
    let x_minus = w * (n + 0.5) + (1.0 - w) * (2.0 * r).exp() / 2.0;
    Ok((x_plus, x_minus))
}

/// Bogoliubov occupation as γ/(γ+Γ)·[n̄ + (2n̄+1) sinh²r].
pub fn n_beta_bath_form(model: &EffectiveModel) -> Result<f64> {
    let (g, n) = symmetric_params(model)?;
    let big = model.big_gamma();
    Ok(g / (g + big) * (n + (2.0 * n + 1.0) * model.r().sinh().powi(2)))
}

/// Two-mode covariance implied by the collective moments (symmetric TTMSS form).
pub fn adiabatic_covariance(model: &EffectiveModel) -> Result<CovarianceMatrix> {
    let m = collective_moments(model)?;
    let (s, t) = (m.x_plus_sq, m.x_minus_sq);
    let d = 0.5 * (s + t);
    let c = 0.5 * (s - t);
    #[rustfmt::skip]
    let v = RMatrix::from_row_slice(4, 4, &[
        d, 0.0, c, 0.0,
        0.0, d, 0.0, -c,
        c, 0.0, d, 0.0,
        0.0, -c, 0.0, d,
    ]);
    CovarianceMatrix::new(v)
}

/// Duan quantity 2⟨X₊²⟩ as a function of asymmetry x = G₊/G₋ at fixed C₋.
pub fn duan_adiabatic(asymmetry: f64, c_minus: f64, nbar: f64) -> f64 {
    let x = asymmetry;
    (2.0 * nbar + 1.0 + c_minus * (1.0 - x).powi(2)) / (1.0 + c_minus * (1.0 - x * x))
}

/// Closed-form optimum `1 + (1+n̄)/C₋ − √((1 + 1/C₋)/C₋)`; exact only for n̄ = 0,
/// see [`optimal_asymmetry_exact`].
pub fn optimal_asymmetry(c_minus: f64, nbar: f64) -> f64 {
    1.0 + (1.0 + nbar) / c_minus - ((1.0 + 1.0 / c_minus) / c_minus).sqrt()
}

pub fn optimal_asymmetry_large_c(c_minus: f64) -> f64 {
    1.0 - 1.0 / c_minus.sqrt()
}

/// Stationary point of [`duan_adiabatic`] in x.
pub fn optimal_asymmetry_exact(c_minus: f64, nbar: f64) -> f64 {
    let a = (nbar + 1.0) / c_minus;
    1.0 + a - (a * a + (2.0 * nbar + 1.0) / c_minus).sqrt()
}

/// First-order Duan value at the optimum, `(1+n̄)/√C₋ + n̄(1+n̄)/C₋`.
pub fn duan_at_optimum(c_minus: f64, nbar: f64) -> f64 {
    (1.0 + nbar) / c_minus.sqrt() + nbar * (1.0 + nbar) / c_minus
}
