use proptest::prelude::*;
use tmss_core::adiabatic::*;
use tmss_core::floquet::golden_section;
use tmss_core::gaussian::{duan_quantity, purity};
use tmss_core::model::{build_collective_adiabatic, build_rwa_quadrature, EffectiveModel};
use tmss_core::steady::{collective_to_modes, steady_state};
use tmss_core::Error;

fn model(x: f64, c: f64, nbar: f64) -> EffectiveModel {
    EffectiveModel::from_ratios(x, c, 0.0, 0.1, 4e-5, nbar).unwrap()
}

#[test]
fn red_only_hot_bath() {
    let m = model(0.0, 1200.0, 25.0);
    assert!((m.big_gamma() - 0.048).abs() < 1e-12);
    let a = collective_moments(&m).unwrap();
    assert!((a.x_plus_sq - 0.52082).abs() < 1e-5);
    assert!((a.duan() - 1.0416).abs() < 1e-4);
    assert_eq!(a.x_plus_sq, a.x_minus_sq);
}

#[test]
fn reference_point() {
    let m = model(0.9, 1200.0, 0.0);
    assert!((m.big_gamma() - 0.00912).abs() < 1e-12);
    let a = collective_moments(&m).unwrap();
    assert!((a.duan() - 0.0568).abs() < 1e-4);
    assert!((a.n_beta - 0.0186).abs() < 1e-4);
    assert!((a.mu - 0.931).abs() < 1e-3);
    // γ/(γ+Γ)·e^{−2r} route
    let (g, big) = (4e-5, 0.00912);
    let want = g / (g + big) * 0.5 + big / (g + big) * 0.5 / 19.0;
    assert!((a.x_plus_sq - want).abs() < 1e-14);
}

#[test]
fn back_action_evading_limit() {
    let nbar = 3.0;
    let c = 1200.0;
    let mut m = model(0.0, c, nbar);
    m.g_plus = m.g_minus;
    let a = collective_moments(&m).unwrap();
    assert!((a.x_plus_sq - (nbar + 0.5)).abs() < 1e-12);
    assert!((a.p_minus_sq - (nbar + 0.5)).abs() < 1e-12);
    // closed form at G₊ = G₋: n̄ + ½ + 2C₋ (heated by back-action)
    assert!((a.x_minus_sq - (nbar + 0.5 + 2.0 * c)).abs() < 1e-9);
}

#[test]
fn asymmetric_params_are_rejected() {
    let mut m = model(0.5, 100.0, 1.0);
    m.gamma_b *= 1.5;
    assert!(matches!(collective_moments(&m), Err(Error::AsymmetricParams)));
    let mut m = model(0.5, 100.0, 1.0);
    m.nbar_b = 2.0;
    assert!(matches!(collective_moments(&m), Err(Error::AsymmetricParams)));
}

#[test]
fn optimal_asymmetry_examples() {
    assert!((optimal_asymmetry(1200.0, 0.0) - 0.97195).abs() < 1e-5);
    assert!((optimal_asymmetry(1200.0, 25.0) - 0.99279).abs() < 1e-5);
    assert!((optimal_asymmetry(1e8, 0.0) - optimal_asymmetry_large_c(1e8)).abs() < 1e-7);
    assert!(optimal_asymmetry_large_c(1e14) > 0.999999);
    assert_eq!(optimal_asymmetry(1200.0, 0.0), optimal_asymmetry_exact(1200.0, 0.0));
}

#[test]
fn duan_at_optimum_examples() {
    assert!((duan_at_optimum(1200.0, 0.0) - 0.02887).abs() < 1e-5);
    assert!((duan_at_optimum(1200.0, 25.0) - 1.2922).abs() < 1e-4);
    assert_eq!(duan_at_optimum(1.0, 0.0), 1.0);
}

#[test]
fn duan_closed_form_matches_moments() {
    for x in [0.0, 0.5, 0.9, 0.97] {
        for n in [0.0, 25.0] {
            let a = collective_moments(&model(x, 1200.0, n)).unwrap();
            assert!((a.duan() - duan_adiabatic(x, 1200.0, n)).abs() < 1e-12 * a.duan());
        }
    }
}

/// Duan of the adiabatic collective model, ⟨X₊²⟩ + ⟨P₋²⟩.
fn collective_duan(x: f64, c: f64, nbar: f64, omega: f64) -> f64 {
    let m = EffectiveModel::from_ratios(x, c, 0.0, omega, 4e-5, nbar).unwrap();
    let v = steady_state(&build_collective_adiabatic(&m)).unwrap();
    v.matrix()[(0, 0)] + v.matrix()[(3, 3)]
}

#[test]
fn numerical_optimum_matches_stationary_point() {
    for c in [1e2, 1e3, 1e4] {
        for n in [0.0, 25.0] {
            let (x, _) = golden_section(|x| collective_duan(x, c, n, 1.0), 0.0, 1.0 - 1e-9, 1e-9);
            assert!((x - optimal_asymmetry_exact(c, n)).abs() <= 1e-3, "C {c} n {n}: {x}");
            if n == 0.0 {
                assert!((x - optimal_asymmetry(c, n)).abs() <= 1e-3);
            }
        }
    }
}

#[test]
fn closed_form_tracks_full_rwa_at_zero_temperature() {
    for k in 0..=19 {
        let x = 0.05 * k as f64;
        let m = model(x, 1200.0, 0.0);
        let v = steady_state(&build_rwa_quadrature(&m)).unwrap().two_mode().unwrap();
        let full = duan_quantity(&v).unwrap();
        let closed = collective_moments(&m).unwrap().duan();
        assert!((full / closed - 1.0).abs() <= 0.02, "x = {x}");
    }
}

#[test]
fn collective_model_reproduces_closed_form() {
    for x in [0.0, 0.6, 0.9] {
        for n in [0.0, 25.0] {
            let m = model(x, 1200.0, n);
            let v = steady_state(&build_collective_adiabatic(&m)).unwrap();
            let a = collective_moments(&m).unwrap();
            assert!((v.matrix()[(0, 0)] / a.x_plus_sq - 1.0).abs() < 5e-3);
            assert!((v.matrix()[(2, 2)] / a.x_minus_sq - 1.0).abs() < 5e-3);
            let modes = collective_to_modes(&v).unwrap();
            assert!((duan_quantity(&modes).unwrap() / a.duan() - 1.0).abs() < 5e-3);
        }
    }
}

#[test]
fn purity_matches_reconstructed_covariance() {
    for x in [0.0, 0.5, 0.9, 0.95] {
        for n in [0.0, 2.0] {
            let m = EffectiveModel::from_ratios(x, 1200.0, 0.0, 10.0, 4e-5, n).unwrap();
            let a = collective_moments(&m).unwrap();
            let mu = purity(&adiabatic_covariance(&m).unwrap()).unwrap();
            assert!((mu / a.mu - 1.0).abs() <= 0.01, "x {x} n {n}: {mu} vs {}", a.mu);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn rational_and_bath_forms_agree(x in 0.0f64..0.995, c in 1.0f64..1e5, g in 1e-6f64..1e-2, n in 0.0f64..50.0) {
        let m = EffectiveModel::from_ratios(x, c, 0.0, 0.1, g, n).unwrap();
        let a = collective_moments(&m).unwrap();
        let (xp, xm) = collective_moments_bath_form(&m).unwrap();
        prop_assert!((a.x_plus_sq - xp).abs() <= 1e-12 * xp.max(1.0));
        prop_assert!((a.x_minus_sq - xm).abs() <= 1e-12 * xm.max(1.0));
        let nb = n_beta_bath_form(&m).unwrap();
        prop_assert!((a.n_beta - nb).abs() <= 1e-12 * nb.max(1.0));
        prop_assert!(a.x_plus_sq * a.x_minus_sq >= 0.25 - 1e-9);
        prop_assert!(a.mu > 0.0 && a.mu <= 1.0 + 1e-12);
    }
}
