use nalgebra::{DMatrix, Matrix2};
use proptest::prelude::*;
use tmss_core::gaussian::*;
use tmss_core::numerics::RMatrix;
use tmss_core::Error;

fn thermal(n_a: f64, n_b: f64) -> CovarianceMatrix {
    ttmss_covariance(0.0, n_a, n_b)
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn duan_examples() {
    assert!(close(duan_quantity(&CovarianceMatrix::vacuum(2)).unwrap(), 1.0, 1e-15));
    assert!(close(duan_quantity(&tmss_covariance(1.0)).unwrap(), (-2.0f64).exp(), 1e-14));
    assert!(close(duan_quantity(&thermal(25.0, 25.0)).unwrap(), 51.0, 1e-12));
}

#[test]
fn duan_needs_two_modes() {
    let v = CovarianceMatrix::vacuum(3);
    assert!(matches!(duan_quantity(&v), Err(Error::DimensionMismatch { expected: 4, got: 6 })));
    assert!(close(duan_quantity(&v.two_mode().unwrap()).unwrap(), 1.0, 1e-15));
}

/// Pure states give exactly degenerate symplectic spectra.
#[test]
fn pure_states_over_squeezing_grid() {
    for i in 0..=400 {
        let xi = 0.00625 * i as f64;
        let v = tmss_covariance(xi);
        let nus = symplectic_eigenvalues(&v).unwrap();
        assert!(nus.iter().all(|&nu| close(nu, 0.5, 1e-12)), "xi = {xi}: {nus:?}");
        assert!(close(log_negativity(&v).unwrap(), 2.0 * xi, 1e-9), "xi = {xi}");
    }
    assert!(close(log_negativity(&tmss_covariance(0.22995767970210335)).unwrap(), 0.4599153594042067, 1e-12));
}

#[test]
fn log_negativity_examples() {
    assert_eq!(log_negativity(&CovarianceMatrix::vacuum(2)).unwrap(), 0.0);
    assert!(close(log_negativity(&tmss_covariance(0.5)).unwrap(), 1.0, 1e-12));
    let e = log_negativity(&ttmss_covariance(1.0, 0.5, 0.5)).unwrap();
    assert!(close(e, 2.0 - 2.0f64.ln(), 1e-12));
}

#[test]
fn log_negativity_rejects_unphysical() {
    let v = CovarianceMatrix::new(RMatrix::identity(4, 4) * 0.3).unwrap();
    assert!(matches!(log_negativity(&v), Err(Error::UnphysicalState { .. })));
    assert!(matches!(purity(&v), Err(Error::UnphysicalState { .. })));
    assert!(!is_physical(&v, 1e-9).unwrap());
}

#[test]
fn purity_examples() {
    assert!(close(purity(&CovarianceMatrix::vacuum(2)).unwrap(), 1.0, 1e-15));
    assert!(close(purity(&thermal(0.5, 0.5)).unwrap(), 0.25, 1e-15));
    assert!(close(purity(&CovarianceMatrix::vacuum(3)).unwrap(), 1.0, 1e-15));
}

#[test]
fn bogoliubov_examples() {
    let (n1, n2) = bogoliubov_occupations(&CovarianceMatrix::vacuum(2), 0.0).unwrap();
    assert_eq!((n1, n2), (0.0, 0.0));
    let (n1, n2) = bogoliubov_occupations(&tmss_covariance(0.8), 0.8).unwrap();
    assert!(n1.abs() < 1e-12 && n2.abs() < 1e-12);
    let (n1, n2) = bogoliubov_occupations(&CovarianceMatrix::vacuum(2), 1.0).unwrap();
    let want = 1.0f64.sinh().powi(2);
    assert!(close(n1, want, 1e-12) && close(n2, want, 1e-12));
    assert!(close(want, 1.3811, 1e-4));
}

#[test]
fn fit_examples() {
    let f = fit_ttmss(&CovarianceMatrix::vacuum(2)).unwrap();
    assert!(f.xi.abs() < 1e-15 && f.nth_a.abs() < 1e-15 && f.nth_b.abs() < 1e-15 && f.residual < 1e-15);
    let f = fit_ttmss(&ttmss_covariance(0.8, 0.1, 0.3)).unwrap();
    assert!(close(f.xi, 0.8, 1e-12) && close(f.nth_a, 0.1, 1e-12) && close(f.nth_b, 0.3, 1e-12));
    assert!(f.residual < 1e-12);
}

#[test]
fn fit_rejects_non_ttmss() {
    #[rustfmt::skip]
    let v = DMatrix::from_row_slice(4, 4, &[
        0.5, 0.0, -0.6, 0.0,
        0.0, 0.5, 0.0, 0.6,
        -0.6, 0.0, 0.5, 0.0,
        0.0, 0.6, 0.0, 0.5,
    ]);
    assert!(matches!(fit_ttmss(&CovarianceMatrix::new(v).unwrap()), Err(Error::NotTTMSSLike)));
}

#[test]
fn fidelity_examples() {
    assert!(close(teleportation_fidelity(&CovarianceMatrix::vacuum(2), &coherent_input()).unwrap(), 0.5, 1e-15));
    let r = 0.9f64.atanh();
    assert!(close(teleportation_fidelity(&tmss_covariance(r), &coherent_input()).unwrap(), 0.95, 1e-12));
    let v = ttmss_covariance(0.7, 0.2, 0.2);
    let f = teleportation_fidelity(&v, &coherent_input()).unwrap();
    assert!(close(f, fidelity_from_logneg(log_negativity(&v).unwrap()), 1e-10));
}

#[test]
fn fidelity_ttmss_examples() {
    let fit = |xi, n| TtmssFit { xi, nth_a: n, nth_b: n, residual: 0.0 };
    assert!(close(fidelity_ttmss(&fit(0.0, 0.0)), 0.5, 1e-15));
    assert!(close(fidelity_ttmss(&fit(30.0, 0.0)), 1.0, 1e-12));
    let f = fidelity_ttmss(&fit(1.0, 0.5));
    assert!(close(f, 1.0 / (2.0 * (-2.0f64).exp() + 1.0), 1e-14));
    assert!(close(f, 0.7870, 1e-4));
}

#[test]
fn fidelity_from_logneg_examples() {
    assert_eq!(fidelity_from_logneg(0.0), 0.5);
    assert!(close(fidelity_from_logneg(2.0f64.ln()), 2.0 / 3.0, 1e-15));
    assert!(close(fidelity_from_logneg(50.0), 1.0, 1e-15));
}

#[test]
fn covariance_construction() {
    assert!(CovarianceMatrix::new(DMatrix::identity(3, 3)).is_err());
    assert!(CovarianceMatrix::new(DMatrix::from_element(2, 2, f64::NAN)).is_err());
    let v = CovarianceMatrix::with_labels(DMatrix::identity(4, 4) * 0.5, vec!["X_+", "P_+", "X_-", "P_-"]).unwrap();
    assert_eq!(v.labels()[2], "X_-");
    assert!(CovarianceMatrix::with_labels(DMatrix::identity(4, 4), vec!["X"]).is_err());
    assert_eq!(CovarianceMatrix::vacuum(3).labels(), &THREE_MODE_LABELS);
}

#[test]
fn symplectic_eigenvalues_of_thermal_state() {
    let nus = symplectic_eigenvalues(&thermal(0.3, 2.0)).unwrap();
    assert!(close(nus[0], 0.8, 1e-12) && close(nus[1], 2.5, 1e-12));
    let nus = symplectic_eigenvalues(&tmss_covariance(1.2)).unwrap();
    assert!(nus.iter().all(|nu| close(*nu, 0.5, 1e-10)));
}

/// 2×2 symplectic: rotation(θ₂)·squeeze(s)·rotation(θ₁).
fn local(theta1: f64, s: f64, theta2: f64) -> Matrix2<f64> {
    let rot = |t: f64| Matrix2::new(t.cos(), -t.sin(), t.sin(), t.cos());
    rot(theta2) * Matrix2::new(s.exp(), 0.0, 0.0, (-s).exp()) * rot(theta1)
}

fn block_diag(a: &Matrix2<f64>, b: &Matrix2<f64>) -> RMatrix {
    let mut m = DMatrix::zeros(4, 4);
    m.view_mut((0, 0), (2, 2)).copy_from(a);
    m.view_mut((2, 2), (2, 2)).copy_from(b);
    m
}

fn beam_splitter(t: f64) -> RMatrix {
    let (c, s) = (t.cos(), t.sin());
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        c, 0.0, s, 0.0,
        0.0, c, 0.0, s,
        -s, 0.0, c, 0.0,
        0.0, -s, 0.0, c,
    ]);
    m
}

fn two_mode_squeezer(r: f64) -> RMatrix {
    let (c, s) = (r.cosh(), r.sinh());
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        c, 0.0, -s, 0.0,
        0.0, c, 0.0, s,
        -s, 0.0, c, 0.0,
        0.0, s, 0.0, c,
    ]);
    m
}

prop_compose! {
    fn physical_state()(
        na in 0.0f64..3.0, nb in 0.0f64..3.0, r in 0.0f64..1.5, bs in 0.0f64..1.6,
        l in prop::array::uniform6(-1.0f64..1.0),
    ) -> CovarianceMatrix {
        let s = block_diag(&local(l[0], 0.4 * l[1], l[2]), &local(l[3], 0.4 * l[4], l[5]))
            * two_mode_squeezer(r)
            * beam_splitter(bs);
        let th = thermal(na, nb);
        CovarianceMatrix::new(&s * th.matrix() * s.transpose()).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn duan_certifies_negativity(v in physical_state()) {
        prop_assert!(is_physical(&v, 1e-9).unwrap());
        if duan_quantity(&v).unwrap() < 1.0 {
            prop_assert!(log_negativity(&v).unwrap() > 0.0);
        }
    }

    #[test]
    fn negativity_invariant_under_local_rotations(v in physical_state(), t in prop::array::uniform2(-3.0f64..3.0)) {
        let rot = block_diag(&local(t[0], 0.0, 0.0), &local(t[1], 0.0, 0.0));
        let w = CovarianceMatrix::new(&rot * v.matrix() * rot.transpose()).unwrap();
        prop_assert!((log_negativity(&v).unwrap() - log_negativity(&w).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn fit_purity_round_trip(xi in 0.0f64..2.0, na in 0.0f64..5.0, nb in 0.0f64..5.0) {
        let fit = fit_ttmss(&ttmss_covariance(xi, na, nb)).unwrap();
        let rebuilt = ttmss_covariance(fit.xi, fit.nth_a, fit.nth_b);
        let want = 1.0 / ((1.0 + 2.0 * fit.nth_a) * (1.0 + 2.0 * fit.nth_b));
        prop_assert!((purity(&rebuilt).unwrap() - want).abs() <= 1e-10);
        prop_assert!(fit.nth_a >= -1e-9 && fit.nth_b >= -1e-9 && fit.residual >= 0.0);
    }

    #[test]
    fn symmetric_channel_fidelity_is_optimal(xi in 0.0f64..2.5, n in 0.0f64..4.0) {
        let v = ttmss_covariance(xi, n, n);
        let f = teleportation_fidelity(&v, &coherent_input()).unwrap();
        let e = log_negativity(&v).unwrap();
        if e > 0.0 {
            prop_assert!((f - fidelity_from_logneg(e)).abs() <= 1e-8);
        }
        prop_assert!((f - fidelity_ttmss(&fit_ttmss(&v).unwrap())).abs() <= 1e-10);
    }

    #[test]
    fn asymmetric_channel_fidelity_is_below_bound(xi in 0.0f64..2.5, na in 0.0f64..4.0, nb in 0.0f64..4.0) {
        let v = ttmss_covariance(xi, na, nb);
        let e = log_negativity(&v).unwrap();
        if e > 0.0 {
            let f = teleportation_fidelity(&v, &coherent_input()).unwrap();
            prop_assert!(f <= fidelity_from_logneg(e) + 1e-12);
        }
    }

    #[test]
    fn tmss_is_bogoliubov_vacuum(r in 0.0f64..3.0) {
        let (n1, n2) = bogoliubov_occupations(&tmss_covariance(r), r).unwrap();
        prop_assert!(n1.abs() <= 1e-10 && n2.abs() <= 1e-10);
    }
}
