//! Per-point evaluation and the sweep drivers behind each subcommand.

use rayon::prelude::*;
use tmss_core::adiabatic::adiabatic_covariance;
use tmss_core::floquet::{dc_covariance_by_ode, golden_section, solve_floquet, FloquetOptions};
use tmss_core::gaussian::{
    bogoliubov_occupations, coherent_input, duan_quantity, fit_ttmss, log_negativity, purity, teleportation_fidelity, CovarianceMatrix,
};
use tmss_core::model::{build_cr_harmonics_with, build_rwa_quadrature, EffectiveModel};
use tmss_core::steady::steady_state;

use crate::config::{ScenarioConfig, Solver};

pub const METRIC_COLUMNS: [&str; 9] =
    ["duan", "log_negativity", "purity", "n_beta_1", "n_beta_2", "ttmss_xi", "ttmss_n_a", "ttmss_n_b", "fidelity"];

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    /// Swept parameter value(s), in the order of the table's parameter columns.
    pub params: Vec<f64>,
    pub solver: Solver,
    /// Metric values in [`METRIC_COLUMNS`] order, or the failure reason.
    pub outcome: Result<[f64; 9], String>,
}

impl ResultRow {
    pub fn failed(&self) -> bool {
        self.outcome.is_err()
    }
}

/// Runs `f` over `0..n` on a pool of `jobs` threads; output is in index order.
pub fn par_map<T: Send>(jobs: usize, n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
    pool.install(|| (0..n).into_par_iter().map(f).collect())
}

/// Two-mode mechanical covariance from the requested solver.
pub fn two_mode_state(
    cfg: &ScenarioConfig,
    overrides: &[(&str, f64)],
    solver: Solver,
    tol: f64,
) -> Result<(CovarianceMatrix, EffectiveModel), String> {
    let (setup, model) = cfg.model_at(overrides).map_err(|e| e.to_string())?;
    let cov = match solver {
        Solver::Adiabatic => adiabatic_covariance(&model),
        Solver::LyapunovRwa => steady_state(&build_rwa_quadrature(&model)).and_then(|v| v.two_mode()),
        Solver::Floquet => cfg.cr_at(overrides, setup.as_ref()).and_then(|cr| {
            let drift = build_cr_harmonics_with(&model, &cr);
            let sol = solve_floquet(&drift, &FloquetOptions { tol, harmonics_out: false })?;
            CovarianceMatrix::new(sol.v0)?.two_mode()
        }),
        Solver::OdeOracle => {
            let drift = match cfg.cr_at(overrides, setup.as_ref()) {
                Ok(cr) => build_cr_harmonics_with(&model, &cr),
                Err(_) => build_rwa_quadrature(&model),
            };
            dc_covariance_by_ode(&drift, None, tol).and_then(CovarianceMatrix::new).and_then(|v| v.two_mode())
        }
    }
    .map_err(|e| e.to_string())?;
    Ok((cov, model))
}

pub fn metrics(v: &CovarianceMatrix, model: &EffectiveModel) -> Result<[f64; 9], String> {
    let run = || -> tmss_core::Result<[f64; 9]> {
        let (n1, n2) = bogoliubov_occupations(v, model.r())?;
        let fit = fit_ttmss(v)?;
        Ok([
            duan_quantity(v)?,
            log_negativity(v)?,
            purity(v)?,
            n1,
            n2,
            fit.xi,
            fit.nth_a,
            fit.nth_b,
            teleportation_fidelity(v, &coherent_input())?,
        ])
    };
    let m = run().map_err(|e| e.to_string())?;
    if let Some(i) = m.iter().position(|x| !x.is_finite()) {
        return Err(format!("{} is not finite", METRIC_COLUMNS[i]));
    }
    if !(m[2] > 0.0 && m[2] <= 1.0) {
        return Err(format!("purity {} outside (0, 1]", m[2]));
    }
    Ok(m)
}

fn evaluate(cfg: &ScenarioConfig, overrides: &[(&str, f64)], solver: Solver) -> Result<[f64; 9], String> {
    let (v, model) = two_mode_state(cfg, overrides, solver, cfg.tol)?;
    metrics(&v, &model)
}

/// Sweep points of the config; a single unswept point when there is no sweep.
pub fn points(cfg: &ScenarioConfig) -> (String, Vec<f64>) {
    match &cfg.sweep {
        Some(s) => (s.param.clone(), s.values()),
        None => ("point".to_string(), vec![0.0]),
    }
}

fn overrides_for(cfg: &ScenarioConfig, x: f64) -> Vec<(&str, f64)> {
    cfg.sweep.iter().map(|s| (s.param.as_str(), x)).collect()
}

/// One row per sweep point with the configured solver.
pub fn run_scenario(cfg: &ScenarioConfig, jobs: usize) -> Vec<ResultRow> {
    let (_, xs) = points(cfg);
    par_map(jobs, xs.len(), |i| ResultRow {
        params: vec![xs[i]],
        solver: cfg.solver,
        outcome: evaluate(cfg, &overrides_for(cfg, xs[i]), cfg.solver),
    })
}

/// RWA, Floquet and (optionally) ODE-oracle rows for every sweep point.
pub fn floquet_compare(cfg: &ScenarioConfig, include_ode: bool, jobs: usize) -> Vec<ResultRow> {
    let (_, xs) = points(cfg);
    let mut solvers = vec![Solver::LyapunovRwa, Solver::Floquet];
    if include_ode {
        solvers.push(Solver::OdeOracle);
    }
    let tasks: Vec<(f64, Solver)> = xs.iter().flat_map(|&x| solvers.iter().map(move |&s| (x, s))).collect();
    par_map(jobs, tasks.len(), |i| {
        let (x, s) = tasks[i];
        ResultRow { params: vec![x], solver: s, outcome: evaluate(cfg, &overrides_for(cfg, x), s) }
    })
}

/// For each C₋, the state at the asymmetry minimizing the Duan quantity.
/// Parameter columns are (c_minus, asymmetry, tms_db).
pub fn sweep_cooperativity(cfg: &ScenarioConfig, c_values: &[f64], x_tol: f64, jobs: usize) -> Vec<ResultRow> {
    par_map(jobs, c_values.len(), |i| {
        let c = c_values[i];
        let duan = |x: f64| {
            two_mode_state(cfg, &[("c_minus", c), ("asymmetry", x)], cfg.solver, cfg.tol)
                .and_then(|(v, _)| duan_quantity(&v).map_err(|e| e.to_string()))
                .unwrap_or(f64::INFINITY)
        };
        let (x, d) = golden_section(duan, 0.0, 1.0 - 1e-9, x_tol);
        let outcome = if d.is_finite() {
            evaluate(cfg, &[("c_minus", c), ("asymmetry", x)], cfg.solver)
        } else {
            Err("no stable asymmetry found".to_string())
        };
        let params = if outcome.is_ok() { vec![c, x, -d.log10()] } else { vec![c, f64::NAN, f64::NAN] };
        ResultRow { params, solver: cfg.solver, outcome }
    })
}
