//! Physical setups, effective couplings and drift/noise matrices.
//!
//! Every rate inside an [`EffectiveModel`] built from a [`PhysicalSetup`] is
//! expressed in units of the reservoir damping `kappa`, so `kappa == 1`.
//!
//! Counter-rotating coefficient matrices are derived by expanding each
//! time-dependent bilinear term of the rotating-frame Hamiltonian into
//! Heisenberg equations for `(s, s†)` and rotating to quadratures with
//! `X = (s + s†)/√2`, `P = (s − s†)/(i√2)`. Writing
//! `u₋ = G₋ − Gᵐ₋`, `u₊ = G₊ + Gᵐ₊` (couplings of mode a) and
//! `v₋ = G₋ + Gᵐ₋`, `v₊ = G₊ − Gᵐ₊` (couplings of mode b), the two-tone
//! drive contributes a single harmonic at `ω_m`:
//!
//! ```text
//! A₁₊ = ½ [[0, 0, Q₊(u₋,u₊)], [0, 0, Q₊(v₋,v₊)], [Q₋(u₋,u₊), Q₋(v₋,v₊), 0]]
//! Q±(x, y) = [[i(−x ∓ y), −x + y], [−x − y, i(x ∓ y)]]
//! ```
//!
//! with `A(t) = A₀ + Σₖ (Aₖ₊ e^{2iδₖt} + Aₖ₋ e^{−2iδₖt})` and `Aₖ₋ = Aₖ₊*`.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)] // inherent f64 methods take over when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::numerics::{CMatrix, RMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    TwoMechanicalOneCavity,
    TwoCavityOneMechanical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriveScheme {
    /// Tones at ω_c ± ω_m with ω_m the mean mechanical frequency.
    TwoTone { e_plus: f64, e_minus: f64 },
    /// Tones at ω_c ± ω₁ and ω_c ± ω₂ with frame offset Ω.
    FourTone { e1_plus: f64, e1_minus: f64, e2_plus: f64, e2_minus: f64, omega: f64 },
}

/// Physical parameters (rad/s). For `TwoCavityOneMechanical`, `a`/`b` are the
/// cavities, `kappa` the mechanical damping and `omega_c` the mechanical
/// frequency; `FourTone` amplitudes 1/2 then drive cavity a/b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalSetup {
    pub topology: Topology,
    pub omega_a: f64,
    pub omega_b: f64,
    pub omega_c: f64,
    pub kappa: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub nbar_a: f64,
    pub nbar_b: f64,
    pub nbar_c: f64,
    pub g_a: f64,
    pub g_b: f64,
    pub drive: DriveScheme,
}

fn positive(x: f64, name: &'static str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, reason: "must be positive and finite" })
    }
}

fn non_negative(x: f64, name: &'static str) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, reason: "must be non-negative and finite" })
    }
}

impl PhysicalSetup {
    pub fn validate(&self) -> Result<()> {
        positive(self.kappa, "kappa")?;
        positive(self.gamma_a, "gamma_a")?;
        positive(self.gamma_b, "gamma_b")?;
        positive(self.g_a, "g_a")?;
        positive(self.g_b, "g_b")?;
        positive(self.omega_a, "omega_a")?;
        positive(self.omega_b, "omega_b")?;
        non_negative(self.omega_c, "omega_c")?;
        non_negative(self.nbar_a, "nbar_a")?;
        non_negative(self.nbar_b, "nbar_b")?;
        non_negative(self.nbar_c, "nbar_c")?;
        if self.omega_a <= self.omega_b {
            return Err(Error::InvalidParameter { name: "omega_a", reason: "must exceed omega_b" });
        }
        match self.drive {
            DriveScheme::TwoTone { e_plus, e_minus } => {
                non_negative(e_plus, "E_plus")?;
                non_negative(e_minus, "E_minus")?;
                if self.topology == Topology::TwoCavityOneMechanical {
                    return Err(Error::InvalidParameter { name: "drive", reason: "two-cavity topology needs four tones" });
                }
            }
            DriveScheme::FourTone { e1_plus, e1_minus, e2_plus, e2_minus, omega } => {
                non_negative(e1_plus, "E_1plus")?;
                non_negative(e1_minus, "E_1minus")?;
                non_negative(e2_plus, "E_2plus")?;
                non_negative(e2_minus, "E_2minus")?;
                positive(omega, "Omega")?;
                if self.topology == Topology::TwoCavityOneMechanical {
                    positive(self.omega_c, "omega_c")?;
                }
            }
        }
        Ok(())
    }

    /// Mean frequency of modes a and b.
    pub fn omega_m(&self) -> f64 {
        0.5 * (self.omega_a + self.omega_b)
    }
}

/// Reduced parameter set defining all drift and noise matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveModel {
    pub g_plus: f64,
    pub g_minus: f64,
    pub gm_plus: f64,
    pub gm_minus: f64,
    pub omega: f64,
    pub kappa: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub nbar_a: f64,
    pub nbar_b: f64,
    /// Thermal occupation of the reservoir mode input (zero for a cavity).
    pub nbar_c: f64,
}

impl EffectiveModel {
    /// Symmetric model in units of κ from the figure-style parameters:
    /// asymmetry G₊/G₋, red cooperativity C₋ = 4G₋²/(γκ), and Gᵐ± = ρ·G±.
    pub fn from_ratios(
        asymmetry: f64,
        c_minus: f64,
        gm_ratio: f64,
        omega_over_kappa: f64,
        gamma_over_kappa: f64,
        nbar: f64,
    ) -> Result<Self> {
        non_negative(c_minus, "C_minus")?;
        positive(gamma_over_kappa, "gamma_over_kappa")?;
        let g_minus = (c_minus * gamma_over_kappa / 4.0).sqrt();
        let g_plus = asymmetry * g_minus;
        let m = EffectiveModel {
            g_plus,
            g_minus,
            gm_plus: gm_ratio * g_plus,
            gm_minus: gm_ratio * g_minus,
            omega: omega_over_kappa,
            kappa: 1.0,
            gamma_a: gamma_over_kappa,
            gamma_b: gamma_over_kappa,
            nbar_a: nbar,
            nbar_b: nbar,
            nbar_c: 0.0,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        positive(self.kappa, "kappa")?;
        positive(self.gamma_a, "gamma_a")?;
        positive(self.gamma_b, "gamma_b")?;
        non_negative(self.nbar_a, "nbar_a")?;
        non_negative(self.nbar_b, "nbar_b")?;
        non_negative(self.nbar_c, "nbar_c")?;
        non_negative(self.g_plus, "G_plus")?;
        non_negative(self.g_minus, "G_minus")?;
        if !(self.omega.is_finite() && self.gm_plus.is_finite() && self.gm_minus.is_finite()) {
            return Err(Error::InvalidParameter { name: "Omega/Gm", reason: "must be finite" });
        }
        if self.g_minus > 0.0 && self.g_plus >= self.g_minus || self.g_minus == 0.0 && self.g_plus > 0.0 {
            return Err(Error::UnstableRegime { g_plus: self.g_plus, g_minus: self.g_minus });
        }
        Ok(())
    }

    /// Squeezing parameter, tanh r = G₊/G₋.
    pub fn r(&self) -> f64 {
        if self.g_minus == 0.0 {
            0.0
        } else {
            (self.g_plus / self.g_minus).atanh()
        }
    }

    /// 𝒢 = √(G₋² − G₊²).
    pub fn script_g(&self) -> f64 {
        (self.g_minus * self.g_minus - self.g_plus * self.g_plus).max(0.0).sqrt()
    }

    /// Optomechanical damping Γ = 4𝒢²/κ.
    pub fn big_gamma(&self) -> f64 {
        4.0 * (self.g_minus * self.g_minus - self.g_plus * self.g_plus) / self.kappa
    }

    pub fn gamma_mean(&self) -> f64 {
        0.5 * (self.gamma_a + self.gamma_b)
    }

    pub fn c_plus(&self) -> f64 {
        4.0 * self.g_plus * self.g_plus / (self.gamma_mean() * self.kappa)
    }

    pub fn c_minus(&self) -> f64 {
        4.0 * self.g_minus * self.g_minus / (self.gamma_mean() * self.kappa)
    }

    /// Couplings of mode a: (u₋, u₊) = (G₋ − Gᵐ₋, G₊ + Gᵐ₊).
    pub fn couplings_a(&self) -> (f64, f64) {
        (self.g_minus - self.gm_minus, self.g_plus + self.gm_plus)
    }

    /// Couplings of mode b: (v₋, v₊) = (G₋ + Gᵐ₋, G₊ − Gᵐ₊).
    pub fn couplings_b(&self) -> (f64, f64) {
        (self.g_minus + self.gm_minus, self.g_plus - self.gm_plus)
    }

    /// Copy with every rate divided by κ.
    pub fn in_kappa_units(&self) -> Self {
        let k = self.kappa;
        EffectiveModel {
            g_plus: self.g_plus / k,
            g_minus: self.g_minus / k,
            gm_plus: self.gm_plus / k,
            gm_minus: self.gm_minus / k,
            omega: self.omega / k,
            kappa: 1.0,
            gamma_a: self.gamma_a / k,
            gamma_b: self.gamma_b / k,
            ..*self
        }
    }
}

fn sideband_amplitude(e: f64, detuning: f64, linewidth: f64) -> f64 {
    e / (detuning * detuning + 0.25 * linewidth * linewidth).sqrt()
}

pub fn effective_from_two_tone(setup: &PhysicalSetup) -> Result<EffectiveModel> {
    setup.validate()?;
    let DriveScheme::TwoTone { e_plus, e_minus } = setup.drive else {
        return Err(Error::InvalidParameter { name: "drive", reason: "expected a two-tone drive" });
    };
    let wm = setup.omega_m();
    let c_plus = sideband_amplitude(e_plus, wm, setup.kappa);
    let c_minus = sideband_amplitude(e_minus, wm, setup.kappa);
    let (ga, gb) = (setup.g_a, setup.g_b);
    let m = EffectiveModel {
        g_plus: 0.5 * (ga + gb) * c_plus,
        g_minus: 0.5 * (ga + gb) * c_minus,
        gm_plus: 0.5 * (ga - gb) * c_plus,
        gm_minus: -0.5 * (ga - gb) * c_minus,
        omega: 0.5 * (setup.omega_a - setup.omega_b),
        kappa: setup.kappa,
        gamma_a: setup.gamma_a,
        gamma_b: setup.gamma_b,
        nbar_a: setup.nbar_a,
        nbar_b: setup.nbar_b,
        nbar_c: setup.nbar_c,
    }
    .in_kappa_units();
    m.validate()?;
    Ok(m)
}

/// Sideband amplitudes (c̄₁₊, c̄₁₋, c̄₂₊, c̄₂₋) of a four-tone drive.
fn four_tone_amplitudes(setup: &PhysicalSetup) -> Result<[f64; 4]> {
    let DriveScheme::FourTone { e1_plus, e1_minus, e2_plus, e2_minus, omega } = setup.drive else {
        return Err(Error::InvalidParameter { name: "drive", reason: "expected a four-tone drive" });
    };
    Ok(match setup.topology {
        Topology::TwoMechanicalOneCavity => {
            let w1 = setup.omega_a - omega;
            let w2 = setup.omega_b + omega;
            [
                sideband_amplitude(e1_plus, w1, setup.kappa),
                sideband_amplitude(e1_minus, w1, setup.kappa),
                sideband_amplitude(e2_plus, w2, setup.kappa),
                sideband_amplitude(e2_minus, w2, setup.kappa),
            ]
        }
        Topology::TwoCavityOneMechanical => {
            let wc = setup.omega_c;
            [
                sideband_amplitude(e1_plus, wc, setup.gamma_a),
                sideband_amplitude(e1_minus, wc, setup.gamma_a),
                sideband_amplitude(e2_plus, wc, setup.gamma_b),
                sideband_amplitude(e2_minus, wc, setup.gamma_b),
            ]
        }
    })
}

pub fn effective_from_four_tone(setup: &PhysicalSetup) -> Result<EffectiveModel> {
    setup.validate()?;
    let [c1p, c1m, c2p, c2m] = four_tone_amplitudes(setup)?;
    let DriveScheme::FourTone { omega, .. } = setup.drive else { unreachable!() };
    let (ga, gb) = (setup.g_a, setup.g_b);
    let m = EffectiveModel {
        g_plus: 0.5 * (ga * c1p + gb * c2p),
        g_minus: 0.5 * (ga * c1m + gb * c2m),
        gm_plus: 0.5 * (ga * c1p - gb * c2p),
        gm_minus: -0.5 * (ga * c1m - gb * c2m),
        omega,
        kappa: setup.kappa,
        gamma_a: setup.gamma_a,
        gamma_b: setup.gamma_b,
        nbar_a: setup.nbar_a,
        nbar_b: setup.nbar_b,
        nbar_c: setup.nbar_c,
    }
    .in_kappa_units();
    m.validate()?;
    Ok(m)
}

/// Dispatches on the drive variant.
pub fn effective_model(setup: &PhysicalSetup) -> Result<EffectiveModel> {
    match setup.drive {
        DriveScheme::TwoTone { .. } => effective_from_two_tone(setup),
        DriveScheme::FourTone { .. } => effective_from_four_tone(setup),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    /// (X_a, P_a, X_b, P_b, X_c, P_c)
    Quadrature,
    /// (a, a†, b, b†, c, c†)
    ModeOperator,
    /// (X₊, P₊, X₋, P₋)
    CollectiveAdiabatic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Harmonic {
    pub delta: f64,
    pub plus: CMatrix,
    pub minus: CMatrix,
}

/// Drift `A₀`, noise input matrix `B₀` and counter-rotating harmonics.
/// The diffusion matrix is `B₀ diag(input_noise) B₀†`, where `input_noise`
/// holds the symmetrized variances of the independent inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct DriftSet {
    pub basis: Basis,
    pub a0: CMatrix,
    pub b0: CMatrix,
    pub input_noise: Vec<f64>,
    pub harmonics: Vec<Harmonic>,
}

impl DriftSet {
    pub fn dim(&self) -> usize {
        self.a0.nrows()
    }

    pub fn diffusion(&self) -> CMatrix {
        let mut bw = self.b0.clone();
        for (j, w) in self.input_noise.iter().enumerate() {
            let mut col = bw.column_mut(j);
            col *= Complex64::new(*w, 0.0);
        }
        bw * self.b0.adjoint()
    }

    /// `A₀` as a real matrix; only meaningful in the real bases.
    pub fn a0_real(&self) -> RMatrix {
        self.a0.map(|z| z.re)
    }

    pub fn diffusion_real(&self) -> RMatrix {
        self.diffusion().map(|z| z.re)
    }

    /// `A(t)` of the time-periodic system (real in the quadrature basis).
    pub fn drift_at(&self, t: f64) -> RMatrix {
        let mut a = self.a0_real();
        for h in &self.harmonics {
            let ph = Complex64::new(0.0, 2.0 * h.delta * t).exp();
            a += (&h.plus * ph + &h.minus * ph.conj()).map(|z| z.re);
        }
        a
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn real_to_complex(a: &RMatrix) -> CMatrix {
    a.map(|x| c(x, 0.0))
}

fn put2(m: &mut RMatrix, r: usize, col: usize, b: [[f64; 2]; 2]) {
    for i in 0..2 {
        for j in 0..2 {
            m[(r + i, col + j)] = b[i][j];
        }
    }
}

/// Static RWA drift in the quadrature basis.
pub fn build_rwa_quadrature(model: &EffectiveModel) -> DriftSet {
    let EffectiveModel { g_plus: gp, g_minus: gmn, gm_plus, gm_minus, omega: w, kappa: k, gamma_a, gamma_b, .. } = *model;
    let gs = gm_minus + gm_plus;
    let gd = gm_minus - gm_plus;
    let mut a = RMatrix::zeros(6, 6);
    put2(&mut a, 0, 0, [[-gamma_a / 2.0, w], [-w, -gamma_a / 2.0]]);
    put2(&mut a, 2, 2, [[-gamma_b / 2.0, -w], [w, -gamma_b / 2.0]]);
    put2(&mut a, 4, 4, [[-k / 2.0, 0.0], [0.0, -k / 2.0]]);
    let ca = [[0.0, gmn - gp - gs], [-gmn - gp + gd, 0.0]];
    let cb = [[0.0, gmn - gp + gs], [-gmn - gp - gd, 0.0]];
    put2(&mut a, 0, 4, ca);
    put2(&mut a, 4, 0, ca);
    put2(&mut a, 2, 4, cb);
    put2(&mut a, 4, 2, cb);

    let sa = (gamma_a * (model.nbar_a + 0.5)).sqrt();
    let sb = (gamma_b * (model.nbar_b + 0.5)).sqrt();
    let sc = (k * (model.nbar_c + 0.5)).sqrt();
    let b = RMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![sa, sa, sb, sb, sc, sc]));
    DriftSet {
        basis: Basis::Quadrature,
        a0: real_to_complex(&a),
        b0: real_to_complex(&b),
        input_noise: vec![1.0; 6],
        harmonics: Vec::new(),
    }
}

/// Static drift in the mode-operator basis.
pub fn build_mode_operator(model: &EffectiveModel) -> DriftSet {
    let EffectiveModel { g_plus: gp, g_minus: gmn, gm_plus, gm_minus, omega: w, kappa: k, gamma_a, gamma_b, .. } = *model;
    let i = c(0.0, 1.0);
    let mut a = CMatrix::zeros(6, 6);
    a[(0, 0)] = c(-gamma_a / 2.0, -w);
    a[(1, 1)] = c(-gamma_a / 2.0, w);
    a[(2, 2)] = c(-gamma_b / 2.0, w);
    a[(3, 3)] = c(-gamma_b / 2.0, -w);
    a[(4, 4)] = c(-k / 2.0, 0.0);
    a[(5, 5)] = c(-k / 2.0, 0.0);
    let ca = [[-gmn + gm_minus, -gp - gm_plus], [gp + gm_plus, gmn - gm_minus]];
    let cb = [[-gmn - gm_minus, -gp + gm_plus], [gp - gm_plus, gmn + gm_minus]];
    for r in 0..2 {
        for s in 0..2 {
            a[(r, 4 + s)] = i * ca[r][s];
            a[(4 + r, s)] = i * ca[r][s];
            a[(2 + r, 4 + s)] = i * cb[r][s];
            a[(4 + r, 2 + s)] = i * cb[r][s];
        }
    }
    let (sa, sb, sk) = (gamma_a.sqrt(), gamma_b.sqrt(), k.sqrt());
    let b =
        CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(sa, 0.0), c(sa, 0.0), c(sb, 0.0), c(sb, 0.0), c(sk, 0.0), c(sk, 0.0)]));
    let (na, nb, nc) = (model.nbar_a + 0.5, model.nbar_b + 0.5, model.nbar_c + 0.5);
    DriftSet { basis: Basis::ModeOperator, a0: a, b0: b, input_noise: vec![na, na, nb, nb, nc, nc], harmonics: Vec::new() }
}

/// Per-mode map `(s, s†) = U₂ (X, P)` with `U₂ = [[1, i], [1, −i]]/√2`,
/// block-diagonal over `modes` modes.
pub fn quadrature_to_mode(modes: usize) -> CMatrix {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let mut u = CMatrix::zeros(2 * modes, 2 * modes);
    for m in 0..modes {
        let o = 2 * m;
        u[(o, o)] = c(h, 0.0);
        u[(o, o + 1)] = c(0.0, h);
        u[(o + 1, o)] = c(h, 0.0);
        u[(o + 1, o + 1)] = c(0.0, -h);
    }
    u
}

/// Mode-basis covariance `U V Uᵀ*` back to the quadrature basis.
pub fn mode_covariance_to_quadrature(v_mode: &CMatrix) -> RMatrix {
    let u = quadrature_to_mode(v_mode.nrows() / 2);
    (u.adjoint() * v_mode * &u).map(|z| z.re)
}

/// Effective squeezed-bath occupations (n̄₁, n̄₂) seen by X₊ and P₊.
pub fn effective_bath_occupations(model: &EffectiveModel) -> (f64, f64) {
    let (gm, gp) = (model.g_minus, model.g_plus);
    if gm == 0.0 {
        return (0.0, 0.0);
    }
    (0.5 * (gm - gp) / (gm + gp) - 0.5, 0.5 * (gm + gp) / (gm - gp) - 0.5)
}

/// Adiabatic collective-quadrature model in (X₊, P₊, X₋, P₋).
///
/// Inputs are the four mechanical quadrature noises (variances n̄ + ½) and
/// the two cavity-mediated inputs coupled with `√(2Γ)` to X₊ and P₊
/// (variances n̄₁ + ½ and n̄₂ + ½), so the cavity diffusion is `Γe^{∓2r}`.
pub fn build_collective_adiabatic(model: &EffectiveModel) -> DriftSet {
    let g = model.gamma_mean();
    let l = (model.gamma_a - model.gamma_b) / (2.0 * g);
    let big = model.big_gamma();
    let w = model.omega;
    let mut a = RMatrix::zeros(4, 4);
    put2(&mut a, 0, 0, [[-(g / 2.0 + big), 0.0], [0.0, -(g / 2.0 + big)]]);
    put2(&mut a, 2, 2, [[-g / 2.0, 0.0], [0.0, -g / 2.0]]);
    let apm = [[-l * g / 2.0, w], [-w, -l * g / 2.0]];
    put2(&mut a, 0, 2, apm);
    put2(&mut a, 2, 0, apm);

    let pa = (model.gamma_a / 2.0).sqrt();
    let pb = (model.gamma_b / 2.0).sqrt();
    let cav = (2.0 * big).sqrt();
    let mut b = RMatrix::zeros(4, 6);
    put2(&mut b, 0, 0, [[pa, 0.0], [0.0, pa]]);
    put2(&mut b, 0, 2, [[pb, 0.0], [0.0, pb]]);
    put2(&mut b, 2, 0, [[pa, 0.0], [0.0, pa]]);
    put2(&mut b, 2, 2, [[-pb, 0.0], [0.0, -pb]]);
    b[(0, 4)] = cav;
    b[(1, 5)] = cav;
    let (n1, n2) = effective_bath_occupations(model);
    let (na, nb) = (model.nbar_a + 0.5, model.nbar_b + 0.5);
    DriftSet {
        basis: Basis::CollectiveAdiabatic,
        a0: real_to_complex(&a),
        b0: real_to_complex(&b),
        input_noise: vec![na, na, nb, nb, n1 + 0.5, n2 + 0.5],
        harmonics: Vec::new(),
    }
}

/// Counter-rotating frequencies (units of κ) and coupling ratio d = g_a/g_b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CounterRotating {
    TwoTone { omega_m: f64 },
    FourTone { delta: f64, omega_1: f64, omega_2: f64, omega_m: f64, d: f64 },
}

impl CounterRotating {
    /// Four-tone frequencies from δ, ω₁ = ω_a − Ω and Ω, using
    /// ω₂ = ω₁ − 2δ and ω_m = ω₁ − δ.
    pub fn four_tone(delta: f64, omega_1: f64, d: f64) -> Self {
        CounterRotating::FourTone { delta, omega_1, omega_2: omega_1 - 2.0 * delta, omega_m: omega_1 - delta, d }
    }

    pub fn from_setup(setup: &PhysicalSetup) -> Result<Self> {
        setup.validate()?;
        if setup.topology != Topology::TwoMechanicalOneCavity {
            return Err(Error::InvalidParameter {
                name: "topology",
                reason: "counter-rotating terms are derived for two mechanical modes only",
            });
        }
        let k = setup.kappa;
        Ok(match setup.drive {
            DriveScheme::TwoTone { .. } => CounterRotating::TwoTone { omega_m: setup.omega_m() / k },
            DriveScheme::FourTone { omega, .. } => CounterRotating::FourTone {
                delta: (0.5 * (setup.omega_a - setup.omega_b) - omega) / k,
                omega_1: (setup.omega_a - omega) / k,
                omega_2: (setup.omega_b + omega) / k,
                omega_m: setup.omega_m() / k,
                d: setup.g_a / setup.g_b,
            },
        })
    }

    pub fn frequencies(&self) -> Vec<f64> {
        match *self {
            CounterRotating::TwoTone { omega_m } => vec![omega_m],
            CounterRotating::FourTone { delta, omega_1, omega_2, omega_m, .. } => vec![delta, omega_2, omega_m, omega_1],
        }
    }
}

/// Mismatch parameters ε± and the derived tilde quantities. Undefined
/// (None) when a sideband coupling of mode a vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mismatch {
    pub eps_plus: f64,
    pub eps_minus: f64,
    pub g_tilde_plus: f64,
    pub g_tilde_minus: f64,
    pub eps_tilde_plus: f64,
    pub eps_tilde_minus: f64,
}

pub fn mismatch(model: &EffectiveModel) -> Option<Mismatch> {
    let (um, up) = model.couplings_a();
    let (vm, vp) = model.couplings_b();
    if um == 0.0 || up == 0.0 {
        return None;
    }
    let (ep, em) = (vp / up, vm / um);
    let den = (1.0 + ep) * (1.0 + em);
    if den == 0.0 {
        return None;
    }
    Some(Mismatch {
        eps_plus: ep,
        eps_minus: em,
        g_tilde_plus: model.g_plus * ep,
        g_tilde_minus: model.g_minus * em,
        eps_tilde_plus: 2.0 * (1.0 + ep) / den,
        eps_tilde_minus: 2.0 * (1.0 + em) / den,
    })
}

type Block = [[Complex64; 2]; 2];

fn q_block(x: f64, y: f64, s: f64) -> Block {
    [[c(0.0, -x - s * y), c(-x + y, 0.0)], [c(-x - y, 0.0), c(0.0, x - s * y)]]
}

fn m_block(x: f64, y: f64, s: f64) -> Block {
    [[c(0.0, -s * x - y), c(x - y, 0.0)], [c(-x - y, 0.0), c(0.0, -s * x + y)]]
}

fn n_block(x: f64, y: f64, s: f64) -> Block {
    [[c(0.0, s * x + y), c(x - y, 0.0)], [c(-x - y, 0.0), c(0.0, s * x - y)]]
}

/// ½ [[0, 0, a₊], [0, 0, b₊], [a₋, b₋, 0]] from per-mode block builders.
fn harmonic_matrix(a: Option<&dyn Fn(f64) -> Block>, b: Option<&dyn Fn(f64) -> Block>) -> CMatrix {
    let mut m = CMatrix::zeros(6, 6);
    for (off, blk) in [(0usize, a), (2usize, b)] {
        let Some(f) = blk else { continue };
        let up = f(1.0);
        let lo = f(-1.0);
        for i in 0..2 {
            for j in 0..2 {
                m[(off + i, 4 + j)] = up[i][j] * 0.5;
                m[(4 + i, off + j)] = lo[i][j] * 0.5;
            }
        }
    }
    m
}

fn harmonic(delta: f64, plus: CMatrix) -> Harmonic {
    let minus = plus.map(|z| z.conj());
    Harmonic { delta, plus, minus }
}

/// RWA drift plus counter-rotating harmonics for explicit CR frequencies.
pub fn build_cr_harmonics_with(model: &EffectiveModel, cr: &CounterRotating) -> DriftSet {
    let mut set = build_rwa_quadrature(model);
    let (um, up) = model.couplings_a();
    let (vm, vp) = model.couplings_b();
    set.harmonics = match *cr {
        CounterRotating::TwoTone { omega_m } => {
            let a = move |s| q_block(um, up, s);
            let b = move |s| q_block(vm, vp, s);
            vec![harmonic(omega_m, harmonic_matrix(Some(&a), Some(&b)))]
        }
        CounterRotating::FourTone { delta, omega_1, omega_2, omega_m, d } => {
            let a1 = move |s| m_block(d * vm, d * vp, s);
            let b1 = move |s| n_block(um / d, up / d, s);
            let b2 = move |s| q_block(vm, vp, s);
            let a3 = move |s| q_block(d * vm, d * vp, s);
            let b3 = move |s| q_block(um / d, up / d, s);
            let a4 = move |s| q_block(um, up, s);
            vec![
                harmonic(delta, harmonic_matrix(Some(&a1), Some(&b1))),
                harmonic(omega_2, harmonic_matrix(None, Some(&b2))),
                harmonic(omega_m, harmonic_matrix(Some(&a3), Some(&b3))),
                harmonic(omega_1, harmonic_matrix(Some(&a4), None)),
            ]
        }
    };
    set
}

pub fn build_cr_harmonics(setup: &PhysicalSetup, model: &EffectiveModel) -> Result<DriftSet> {
    let cr = CounterRotating::from_setup(setup)?;
    Ok(build_cr_harmonics_with(model, &cr))
}

#[derive(Debug, Clone, PartialEq)]
pub enum RegimeWarning {
    /// Ω/γ below 10: Bogoliubov sum/difference modes weakly mixed.
    SlowRotation { omega_over_gamma: f64 },
    /// Ω not small against (ω_a − ω_b)/2 − γ.
    LargeFrameOffset { omega: f64, limit: f64 },
    /// Counter-rotating frequency below 10κ.
    UnresolvedSideband { name: &'static str, ratio: f64 },
    /// κ does not exceed Ω or G₋ (adiabatic elimination invalid).
    NonAdiabatic { omega_over_kappa: f64, g_minus_over_kappa: f64 },
}

impl fmt::Display for RegimeWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RegimeWarning::SlowRotation { omega_over_gamma } => {
                write!(f, "Omega/gamma = {omega_over_gamma:.4} < 10: rotation too slow to couple the Bogoliubov sum and difference modes")
            }
            RegimeWarning::LargeFrameOffset { omega, limit } => {
                write!(f, "Omega = {omega:.4e} is not small against (omega_a - omega_b)/2 - gamma = {limit:.4e}")
            }
            RegimeWarning::UnresolvedSideband { name, ratio } => {
                write!(f, "{name}/kappa = {ratio:.4} < 10: sidebands not resolved, counter-rotating terms matter")
            }
            RegimeWarning::NonAdiabatic { omega_over_kappa, g_minus_over_kappa } => write!(
                f,
                "adiabatic regime violated: Omega/kappa = {omega_over_kappa:.4}, G_minus/kappa = {g_minus_over_kappa:.4} (need both < 1)"
            ),
        }
    }
}

impl RegimeWarning {
    pub fn message(&self) -> String {
        alloc::format!("{self}")
    }
}

pub fn sideband_warnings(cr: &CounterRotating) -> Vec<RegimeWarning> {
    let mut out = Vec::new();
    let mut check = |name: &'static str, w: f64| {
        if w.abs() < 10.0 {
            out.push(RegimeWarning::UnresolvedSideband { name, ratio: w.abs() });
        }
    };
    match *cr {
        CounterRotating::TwoTone { omega_m } => check("omega_m", omega_m),
        CounterRotating::FourTone { omega_1, omega_2, .. } => {
            check("omega_1", omega_1);
            check("omega_2", omega_2);
        }
    }
    out
}

/// Regime checks; `setup` adds the drive-geometry conditions.
pub fn validate_regime(setup: Option<&PhysicalSetup>, model: &EffectiveModel) -> Vec<RegimeWarning> {
    let mut out = Vec::new();
    let gamma = model.gamma_a.max(model.gamma_b);
    let ratio = model.omega / gamma;
    if ratio < 10.0 {
        out.push(RegimeWarning::SlowRotation { omega_over_gamma: ratio });
    }
    if model.omega >= model.kappa || model.g_minus >= model.kappa || model.g_plus >= model.kappa {
        out.push(RegimeWarning::NonAdiabatic {
            omega_over_kappa: model.omega / model.kappa,
            g_minus_over_kappa: model.g_minus / model.kappa,
        });
    }
    if let Some(s) = setup {
        if let DriveScheme::FourTone { omega, .. } = s.drive {
            if s.topology == Topology::TwoMechanicalOneCavity {
                let limit = 0.5 * (s.omega_a - s.omega_b) - s.gamma_a.max(s.gamma_b);
                if omega * 10.0 > limit {
                    out.push(RegimeWarning::LargeFrameOffset { omega, limit });
                }
            }
        }
        if let Ok(cr) = CounterRotating::from_setup(s) {
            out.extend(sideband_warnings(&cr));
        } else if s.topology == Topology::TwoCavityOneMechanical && s.omega_c < 10.0 * s.gamma_a.max(s.gamma_b) {
            out.push(RegimeWarning::UnresolvedSideband { name: "omega_c", ratio: s.omega_c / s.gamma_a.max(s.gamma_b) });
        }
    }
    out
}
