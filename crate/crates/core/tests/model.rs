use nalgebra::DMatrix;
use num_complex::Complex64;
use tmss_core::model::*;
use tmss_core::numerics::*;
use tmss_core::steady::steady_state;
use tmss_core::Error;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn reference(asymmetry: f64, nbar: f64) -> EffectiveModel {
    EffectiveModel::from_ratios(asymmetry, 1200.0, 0.0, 0.1, 4e-5, nbar).unwrap()
}

fn two_tone_setup(ga: f64, gb: f64, e_plus: f64, e_minus: f64) -> PhysicalSetup {
    PhysicalSetup {
        topology: Topology::TwoMechanicalOneCavity,
        omega_a: 2.0e7,
        omega_b: 1.98e7,
        omega_c: 0.0,
        kappa: 1.0e6,
        gamma_a: 40.0,
        gamma_b: 40.0,
        nbar_a: 0.0,
        nbar_b: 0.0,
        nbar_c: 0.0,
        g_a: ga,
        g_b: gb,
        drive: DriveScheme::TwoTone { e_plus, e_minus },
    }
}

/// Amplitude E that yields sideband amplitude `cbar` at the given detuning.
fn drive_for(cbar: f64, detuning: f64, kappa: f64) -> f64 {
    cbar * (detuning * detuning + kappa * kappa / 4.0).sqrt()
}

fn four_tone_setup(ga: f64, gb: f64, cbar: [f64; 4]) -> PhysicalSetup {
    let (wa, wb, k, om) = (2.0e7, 1.98e7, 1.0e6, 1.0e4);
    let (w1, w2) = (wa - om, wb + om);
    PhysicalSetup {
        drive: DriveScheme::FourTone {
            e1_plus: drive_for(cbar[0], w1, k),
            e1_minus: drive_for(cbar[1], w1, k),
            e2_plus: drive_for(cbar[2], w2, k),
            e2_minus: drive_for(cbar[3], w2, k),
            omega: om,
        },
        ..two_tone_setup(ga, gb, 0.0, 0.0)
    }
}

#[test]
fn two_tone_equal_couplings_cancel_imperfections() {
    let m = effective_from_two_tone(&two_tone_setup(10.0, 10.0, 1e9, 2e9)).unwrap();
    assert_eq!(m.gm_plus, 0.0);
    assert_eq!(m.gm_minus, 0.0);
    assert!(m.g_plus > 0.0 && m.g_minus > m.g_plus);
    assert!((m.omega - 0.1).abs() < 1e-15);
    assert_eq!(m.kappa, 1.0);
}

#[test]
fn two_tone_unequal_couplings_ratio() {
    let m = effective_from_two_tone(&two_tone_setup(15.0, 10.0, 1e9, 2e9)).unwrap();
    assert!((m.gm_plus / m.g_plus - 0.2).abs() < 1e-14);
    assert!((m.gm_minus / m.g_minus + 0.2).abs() < 1e-14);
}

#[test]
fn two_tone_single_red_drive() {
    let m = effective_from_two_tone(&two_tone_setup(15.0, 10.0, 0.0, 2e9)).unwrap();
    assert_eq!(m.g_plus, 0.0);
    assert_eq!(m.gm_plus, 0.0);
    assert_eq!(m.r(), 0.0);
}

#[test]
fn two_tone_blue_dominant_is_unstable() {
    let r = effective_from_two_tone(&two_tone_setup(10.0, 10.0, 2e9, 1e9));
    assert!(matches!(r, Err(Error::UnstableRegime { .. })));
}

#[test]
fn four_tone_matched_drives() {
    // c̄₁±/c̄₂± = g_b/g_a
    let m = effective_from_four_tone(&four_tone_setup(10.0, 20.0, [0.02, 0.04, 0.01, 0.02])).unwrap();
    assert!(m.gm_plus.abs() < 1e-12 * m.g_plus);
    assert!(m.gm_minus.abs() < 1e-12 * m.g_minus);
    assert!((m.omega - 0.01).abs() < 1e-15);
}

#[test]
fn four_tone_ten_percent_mismatch() {
    let m = effective_from_four_tone(&four_tone_setup(10.0, 20.0, [0.022, 0.044, 0.01, 0.02])).unwrap();
    assert!((m.gm_plus / m.g_plus - 1.0 / 21.0).abs() < 1e-12);
    assert!((m.gm_minus / m.g_minus + 1.0 / 21.0).abs() < 1e-12);
}

#[test]
fn four_tone_zero_drive() {
    let m = effective_from_four_tone(&four_tone_setup(10.0, 20.0, [0.0; 4])).unwrap();
    assert_eq!((m.g_plus, m.g_minus, m.gm_plus, m.gm_minus), (0.0, 0.0, 0.0, 0.0));
}

#[test]
fn two_cavity_topology_relabels() {
    let mut s = four_tone_setup(10.0, 20.0, [0.02, 0.04, 0.01, 0.02]);
    s.topology = Topology::TwoCavityOneMechanical;
    assert!(effective_model(&s).is_err(), "omega_c must be set for the two-cavity variant");
    s.omega_c = 1.0e7;
    let m = effective_model(&s).unwrap();
    assert!(m.g_minus > m.g_plus);
    assert!(CounterRotating::from_setup(&s).is_err());
}

#[test]
fn setup_validation() {
    let mut s = two_tone_setup(10.0, 10.0, 1e9, 2e9);
    s.kappa = 0.0;
    assert!(matches!(s.validate(), Err(Error::InvalidParameter { name: "kappa", .. })));
    let mut s = two_tone_setup(10.0, 10.0, 1e9, 2e9);
    s.omega_b = s.omega_a;
    assert!(s.validate().is_err());
}

#[test]
fn derived_quantities() {
    let m = reference(0.9, 0.0);
    assert!((m.r() - 0.9f64.atanh()).abs() < 1e-14);
    let g2 = m.g_minus.powi(2) - m.g_plus.powi(2);
    assert!((m.script_g() - g2.sqrt()).abs() < 1e-15);
    assert!((m.big_gamma() - 4.0 * g2).abs() < 1e-15);
    assert!((m.big_gamma() - 0.00912).abs() < 1e-5);
    assert!((m.c_minus() - 1200.0).abs() < 1e-9);
    assert!((m.c_plus() - 1200.0 * 0.81).abs() < 1e-9);
}

#[test]
fn rwa_decoupled_blocks() {
    let mut m = reference(0.0, 0.0);
    m.g_minus = 0.0;
    let a = build_rwa_quadrature(&m).a0_real();
    let (g, w) = (4e-5, 0.1);
    #[rustfmt::skip]
    let want = DMatrix::from_row_slice(6, 6, &[
        -g / 2.0, w, 0.0, 0.0, 0.0, 0.0,
        -w, -g / 2.0, 0.0, 0.0, 0.0, 0.0,
        0.0, 0.0, -g / 2.0, -w, 0.0, 0.0,
        0.0, 0.0, w, -g / 2.0, 0.0, 0.0,
        0.0, 0.0, 0.0, 0.0, -0.5, 0.0,
        0.0, 0.0, 0.0, 0.0, 0.0, -0.5,
    ]);
    assert!((a - want).abs().max() < 1e-15);
    assert!(build_rwa_quadrature(&m).harmonics.is_empty());
}

#[test]
fn rwa_red_only_coupling_blocks() {
    let m = reference(0.0, 0.0);
    let a = build_rwa_quadrature(&m).a0_real();
    let gm = m.g_minus;
    for (r, c) in [(0, 4), (4, 0), (2, 4), (4, 2)] {
        let blk = a.view((r, c), (2, 2));
        assert_eq!(blk[(0, 0)], 0.0);
        assert!((blk[(0, 1)] - gm).abs() < 1e-15);
        assert!((blk[(1, 0)] + gm).abs() < 1e-15);
        assert_eq!(blk[(1, 1)], 0.0);
    }
}

#[test]
fn rwa_noise_matrix() {
    let m = EffectiveModel::from_ratios(0.5, 100.0, 0.0, 0.1, 1e-3, 3.0).unwrap();
    let d = build_rwa_quadrature(&m);
    let b = d.b0.map(|z| z.re);
    let want =
        [(1e-3f64 * 3.5).sqrt(), (1e-3f64 * 3.5).sqrt(), (1e-3f64 * 3.5).sqrt(), (1e-3f64 * 3.5).sqrt(), 0.5f64.sqrt(), 0.5f64.sqrt()];
    for (i, w) in want.iter().enumerate() {
        assert!((b[(i, i)] - w).abs() < 1e-15);
    }
    assert!((b.clone() - DMatrix::from_diagonal(&b.diagonal())).abs().max() == 0.0);
}

#[test]
fn reference_stable_over_asymmetry_range() {
    for k in 0..=99 {
        let x = k as f64 / 100.0;
        let a = build_rwa_quadrature(&reference(x, 0.0)).a0_real();
        assert!(stability_report(&a).unwrap().is_stable, "x = {x}");
    }
}

#[test]
fn mode_operator_trivial_diagonal() {
    let m = EffectiveModel {
        g_plus: 0.0,
        g_minus: 0.0,
        gm_plus: 0.0,
        gm_minus: 0.0,
        omega: 0.0,
        kappa: 1.0,
        gamma_a: 0.1,
        gamma_b: 0.2,
        nbar_a: 0.0,
        nbar_b: 0.0,
        nbar_c: 0.0,
    };
    let a = build_mode_operator(&m).a0;
    let want = [-0.05, -0.05, -0.1, -0.1, -0.5, -0.5];
    for i in 0..6 {
        for j in 0..6 {
            let w = if i == j { want[i] } else { 0.0 };
            assert!((a[(i, j)] - Complex64::new(w, 0.0)).norm() < 1e-15);
        }
    }
}

#[test]
fn mode_operator_symmetric_coupling_without_imperfections() {
    let a = build_mode_operator(&reference(0.6, 0.0)).a0;
    assert_eq!(a.view((0, 4), (2, 2)), a.view((2, 4), (2, 2)));
    assert_eq!(a.view((4, 0), (2, 2)), a.view((4, 2), (2, 2)));
}

#[test]
fn mode_operator_is_basis_change_of_quadrature_drift() {
    let m = EffectiveModel::from_ratios(0.7, 30.0, 0.25, 0.1, 1e-2, 1.0).unwrap();
    let q = build_rwa_quadrature(&m);
    let md = build_mode_operator(&m);
    let u = quadrature_to_mode(3);
    let u_inv = u.adjoint();
    assert!((&u * &q.a0 * &u_inv - &md.a0).map(|z| z.norm()).max() < 1e-14);
}

#[test]
fn mode_and_quadrature_steady_states_agree() {
    for (x, rho, n) in [(0.0, 0.0, 0.0), (0.6, 0.3, 2.0), (0.9, -0.5, 25.0)] {
        let m = EffectiveModel::from_ratios(x, 300.0, rho, 0.1, 1e-3, n).unwrap();
        let vq = steady_state(&build_rwa_quadrature(&m)).unwrap();
        let vm = steady_state(&build_mode_operator(&m)).unwrap();
        let diff = (vq.matrix() - vm.matrix()).abs().max() / vq.matrix().abs().max();
        assert!(diff < 1e-10, "{diff}");
    }
}

#[test]
fn collective_equal_damping_is_rotation() {
    let a = build_collective_adiabatic(&reference(0.5, 0.0)).a0_real();
    let blk = a.view((0, 2), (2, 2));
    assert_eq!(blk[(0, 0)], 0.0);
    assert_eq!(blk[(1, 1)], 0.0);
    assert!((blk[(0, 1)] - 0.1).abs() < 1e-15);
}

#[test]
fn effective_bath_occupation_examples() {
    assert_eq!(effective_bath_occupations(&reference(0.0, 0.0)), (0.0, 0.0));
    let (n1, n2) = effective_bath_occupations(&reference(0.9, 0.0));
    assert!((n1 + 0.5 - 0.1 / 3.8).abs() < 1e-12);
    assert!((n1 + 0.4737).abs() < 1e-4);
    assert!((n2 + 0.5 - 1.9 / 0.2).abs() < 1e-9);
}

#[test]
fn harmonics_are_conjugate_pairs() {
    let m = EffectiveModel::from_ratios(0.8, 100.0, 0.2, 0.1, 1e-3, 0.0).unwrap();
    for cr in [CounterRotating::TwoTone { omega_m: 100.0 }, CounterRotating::four_tone(2.0, 60.0, 1.3)] {
        let d = build_cr_harmonics_with(&m, &cr);
        assert_eq!(d.harmonics.len(), cr.frequencies().len());
        for h in &d.harmonics {
            assert_eq!(h.minus, h.plus.map(|z| z.conj()));
        }
        for t in [0.0, 0.37, 1.9] {
            assert!(d.drift_at(t).iter().all(|x| x.is_finite()));
        }
    }
}

#[test]
fn cr_frequency_sets() {
    assert_eq!(CounterRotating::TwoTone { omega_m: 7.0 }.frequencies(), vec![7.0]);
    let cr = CounterRotating::four_tone(0.5, 100.0, 1.0);
    assert_eq!(cr.frequencies(), vec![0.5, 99.0, 99.5, 100.0]);
    let s = four_tone_setup(10.0, 20.0, [0.02, 0.04, 0.01, 0.02]);
    let CounterRotating::FourTone { delta, omega_1, omega_2, omega_m, d } = CounterRotating::from_setup(&s).unwrap() else {
        panic!("expected four tones");
    };
    // δ = (ω_a − ω_b)/2 − Ω, ω₁ = ω_a − Ω, ω₂ = ω_b + Ω, in units of κ
    assert!((delta - 0.09).abs() < 1e-12);
    assert!((omega_1 - 19.99).abs() < 1e-12);
    assert!((omega_2 - 19.81).abs() < 1e-12);
    assert!((omega_m - 19.9).abs() < 1e-12);
    assert!((d - 0.5).abs() < 1e-15);
}

/// Drift of a cavity coupled to modes a/b by beam-splitter (`bs`, λ m†c e^{iφt} + h.c.)
/// and two-mode (`tm`, λ m†c† e^{iφt} + h.c.) terms, read off the Heisenberg
/// equations at the phase `phi` and mapped to quadratures.
#[derive(Clone, Copy)]
enum Kind {
    Bs,
    Tm,
}

fn hamiltonian_drift(terms: &[(usize, Kind, f64, f64)], phi: f64) -> CMatrix {
    let mut m = CMatrix::zeros(6, 6);
    let mut add = |freq: f64, r: usize, c: usize, v: Complex64| {
        if (freq - phi).abs() < 1e-12 {
            m[(r, c)] += v;
        }
    };
    for &(mode, kind, lam, ph) in terms {
        let (s, sd, c, cd) = (2 * mode, 2 * mode + 1, 4, 5);
        let lam = Complex64::new(lam, 0.0);
        match kind {
            Kind::Bs => {
                add(-ph, s, c, -I * lam.conj());
                add(ph, sd, cd, I * lam);
                add(ph, c, s, -I * lam);
                add(-ph, cd, sd, I * lam.conj());
            }
            Kind::Tm => {
                add(ph, s, cd, -I * lam);
                add(-ph, sd, c, I * lam.conj());
                add(ph, c, sd, -I * lam);
                add(-ph, cd, s, I * lam.conj());
            }
        }
    }
    let u = quadrature_to_mode(3);
    u.adjoint() * m * u
}

fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).map(|z| z.norm()).max()
}

#[test]
fn two_tone_harmonic_matches_hamiltonian() {
    let m = EffectiveModel { g_plus: 0.1, g_minus: 0.2, gm_plus: 0.03, gm_minus: -0.02, ..reference(0.5, 0.0) };
    let (um, up) = m.couplings_a();
    let (vm, vp) = m.couplings_b();
    // rotating-frame terms at e^{±2iω_m t}: a couples through (u₋, u₊), b through (v₋, v₊)
    let wm = 40.0;
    let terms = [(0, Kind::Bs, up, -2.0 * wm), (0, Kind::Tm, um, 2.0 * wm), (1, Kind::Bs, vp, -2.0 * wm), (1, Kind::Tm, vm, 2.0 * wm)];
    let d = build_cr_harmonics_with(&m, &CounterRotating::TwoTone { omega_m: wm });
    let h = &d.harmonics[0];
    assert!(max_diff(&h.plus, &hamiltonian_drift(&terms, 2.0 * wm)) < 1e-15);
    assert!(max_diff(&h.minus, &hamiltonian_drift(&terms, -2.0 * wm)) < 1e-15);
}

#[test]
fn four_tone_harmonics_match_hamiltonian() {
    let (ga, gb) = (1.5, 1.0);
    let (c1p, c1m, c2p, c2m) = (0.07, 0.11, 0.09, 0.16);
    let m = EffectiveModel {
        g_plus: (ga * c1p + gb * c2p) / 2.0,
        g_minus: (ga * c1m + gb * c2m) / 2.0,
        gm_plus: (ga * c1p - gb * c2p) / 2.0,
        gm_minus: -(ga * c1m - gb * c2m) / 2.0,
        ..reference(0.5, 0.0)
    };
    let (dl, wm, w1, w2) = (1.0, 50.0, 51.0, 49.0);
    let statics = [(0, Kind::Bs, ga * c1m, 0.0), (0, Kind::Tm, ga * c1p, 0.0), (1, Kind::Bs, gb * c2m, 0.0), (1, Kind::Tm, gb * c2p, 0.0)];
    let terms = [
        (0, Kind::Bs, ga * c2m, -2.0 * dl),
        (0, Kind::Bs, ga * c2p, -2.0 * wm),
        (0, Kind::Bs, ga * c1p, -2.0 * w1),
        (0, Kind::Tm, ga * c2p, 2.0 * dl),
        (0, Kind::Tm, ga * c1m, 2.0 * w1),
        (0, Kind::Tm, ga * c2m, 2.0 * wm),
        (1, Kind::Bs, gb * c1m, 2.0 * dl),
        (1, Kind::Bs, gb * c1p, -2.0 * wm),
        (1, Kind::Bs, gb * c2p, -2.0 * w2),
        (1, Kind::Tm, gb * c1p, -2.0 * dl),
        (1, Kind::Tm, gb * c2m, 2.0 * w2),
        (1, Kind::Tm, gb * c1m, 2.0 * wm),
    ];
    let d = build_cr_harmonics_with(&m, &CounterRotating::FourTone { delta: dl, omega_1: w1, omega_2: w2, omega_m: wm, d: ga / gb });
    // static coupling blocks from the same mapping
    let stat = hamiltonian_drift(&statics, 0.0);
    for (r, c) in [(0, 4), (4, 0), (2, 4), (4, 2)] {
        let diff = (stat.view((r, c), (2, 2)) - d.a0.view((r, c), (2, 2))).map(|z| z.norm()).max();
        assert!(diff < 1e-15, "static block ({r},{c}): {diff}");
    }
    for h in &d.harmonics {
        let want = hamiltonian_drift(&terms, 2.0 * h.delta);
        assert!(max_diff(&h.plus, &want) < 1e-14, "delta = {}", h.delta);
    }
}

#[test]
fn mismatch_parameters() {
    assert!(mismatch(&reference(0.0, 0.0)).is_none());
    let m = EffectiveModel::from_ratios(0.5, 100.0, 0.0, 0.1, 1e-3, 0.0).unwrap();
    let mm = mismatch(&m).unwrap();
    assert_eq!((mm.eps_plus, mm.eps_minus), (1.0, 1.0));
    assert_eq!((mm.eps_tilde_plus, mm.eps_tilde_minus), (1.0, 1.0));
}

#[test]
fn regime_warnings() {
    let mut m = reference(0.5, 0.0);
    m.omega = m.gamma_a;
    let w = validate_regime(None, &m);
    assert!(w.iter().any(|w| matches!(w, RegimeWarning::SlowRotation { .. })));
    assert!(w[0].message().contains("Omega/gamma"));
    assert!(validate_regime(None, &reference(0.5, 0.0)).is_empty());
    assert_eq!(sideband_warnings(&CounterRotating::TwoTone { omega_m: 5.0 }).len(), 1);
    assert!(sideband_warnings(&CounterRotating::TwoTone { omega_m: 1e3 }).is_empty());
}

#[test]
fn from_ratios_rejects_bad_input() {
    assert!(EffectiveModel::from_ratios(1.0, 100.0, 0.0, 0.1, 1e-3, 0.0).is_err());
    assert!(EffectiveModel::from_ratios(0.5, -1.0, 0.0, 0.1, 1e-3, 0.0).is_err());
    assert!(EffectiveModel::from_ratios(0.5, 1.0, 0.0, 0.1, 0.0, 0.0).is_err());
}
