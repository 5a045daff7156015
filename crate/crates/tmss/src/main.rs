#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` guards also reject NaN

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tmss::config::{Group, ScenarioConfig, Solver, Sweep};
use tmss::output::{fmt_num, provenance, result_table, Table};
use tmss::scenario::{floquet_compare, run_scenario, sweep_cooperativity, ResultRow};
use tmss_core::model::{sideband_warnings, validate_regime};
use tmss_core::spectrum::{default_grid, output_spectrum};

const EXIT_CONFIG: u8 = 1;
const EXIT_ALL_FAILED: u8 = 2;

#[derive(Parser)]
#[command(name = "tmss", version, about = "Steady-state entanglement datasets for a reservoir-engineered two-mode squeezer")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Scenario file (key = value text, or JSON)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output CSV path (default: output_path from the config, else stdout)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (default: available parallelism)
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Override the config's solver
    #[arg(long, global = true, value_enum)]
    solver: Option<SolverArg>,

    /// Override the config's solver tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum SolverArg {
    Adiabatic,
    LyapunovRwa,
    Floquet,
    OdeOracle,
}

impl From<SolverArg> for Solver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Adiabatic => Solver::Adiabatic,
            SolverArg::LyapunovRwa => Solver::LyapunovRwa,
            SolverArg::Floquet => Solver::Floquet,
            SolverArg::OdeOracle => Solver::OdeOracle,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the config as written (its sweep, or a single point)
    Run,
    /// Sweep the drive asymmetry G+/G-
    SweepAsymmetry {
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        #[arg(long, default_value_t = 0.99)]
        to: f64,
        #[arg(long, default_value_t = 100)]
        points: usize,
    },
    /// Optimize the asymmetry at each cooperativity C- (log-spaced)
    SweepCooperativity {
        #[arg(long, default_value_t = 1e2)]
        from: f64,
        #[arg(long, default_value_t = 1e7)]
        to: f64,
        #[arg(long, default_value_t = 11)]
        points: usize,
        /// Golden-section tolerance on the asymmetry
        #[arg(long, default_value_t = 1e-3)]
        x_tol: f64,
    },
    /// Cavity output spectrum S(omega)
    Spectrum {
        /// Grid points (default grid when omitted)
        #[arg(long)]
        points: Option<usize>,
        /// Grid half-width in units of kappa
        #[arg(long)]
        half_width: Option<f64>,
    },
    /// Paired RWA, Floquet and ODE-oracle rows for the same parameters
    FloquetCompare {
        /// Skip the (slow) time-domain oracle
        #[arg(long)]
        skip_ode: bool,
    },
    /// Print regime warnings only
    Validate,
}

struct Failure(u8, String);

fn config_error(msg: impl Into<String>) -> Failure {
    Failure(EXIT_CONFIG, msg.into())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn load(cli: &Cli) -> Result<ScenarioConfig, Failure> {
    let path = cli.config.as_ref().ok_or_else(|| config_error("--config is required"))?;
    let mut cfg = ScenarioConfig::load(path).map_err(|e| config_error(e.0))?;
    if let Some(s) = cli.solver {
        cfg.solver = s.into();
    }
    if let Some(t) = cli.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(config_error("--tol must be positive"));
        }
        cfg.tol = t;
    }
    cfg.check().map_err(|e| config_error(e.0))?;
    Ok(cfg)
}

fn warnings(cfg: &ScenarioConfig) -> Vec<String> {
    let base: Vec<(&str, f64)> = cfg.sweep.iter().map(|s| (s.param.as_str(), s.from)).collect();
    let Ok((setup, model)) = cfg.model_at(&base) else { return Vec::new() };
    let mut w = validate_regime(setup.as_ref(), &model);
    if setup.is_none() {
        if let Ok(cr) = cfg.cr_at(&base, None) {
            w.extend(sideband_warnings(&cr));
        }
    }
    w.iter().map(|w| w.message()).collect()
}

fn write_table(cli: &Cli, cfg: &ScenarioConfig, table: &Table) -> Result<(), Failure> {
    let path = cli.out.clone().or_else(|| cfg.output_path.clone());
    let res = match path {
        Some(p) => File::create(&p).and_then(|f| {
            let mut w = BufWriter::new(f);
            table.write_to(&mut w)?;
            w.flush()
        }),
        None => table.write_to(io::stdout().lock()),
    };
    res.map_err(|e| config_error(format!("cannot write output: {e}")))
}

fn finish(rows: &[ResultRow]) -> Result<(), Failure> {
    for (i, r) in rows.iter().enumerate() {
        if let Err(e) = &r.outcome {
            eprintln!("row {i} ({}) failed: {e}", r.solver.name());
        }
    }
    if !rows.is_empty() && rows.iter().all(ResultRow::failed) {
        return Err(Failure(EXIT_ALL_FAILED, "every row failed".into()));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = load(&cli)?;
    let jobs = cli.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if jobs == 0 {
        return Err(config_error("--jobs must be at least 1"));
    }
    let notes: Vec<String> = warnings(&cfg).into_iter().map(|w| format!("warning: {w}")).collect();
    for n in &notes {
        eprintln!("{n}");
    }

    match cli.command {
        Command::Validate => {
            let w = warnings(&cfg);
            if w.is_empty() {
                println!("no regime warnings");
            }
            for line in w {
                println!("warning: {line}");
            }
            Ok(())
        }
        Command::Run => {
            let rows = run_scenario(&cfg, jobs);
            let (name, _) = tmss::scenario::points(&cfg);
            write_table(&cli, &cfg, &result_table(&cfg, &[&name], &rows, provenance(&cfg, "run", &notes)))?;
            finish(&rows)
        }
        Command::SweepAsymmetry { from, to, points } => {
            if cfg.group != Group::Effective {
                return Err(config_error("sweep-asymmetry needs an effective-model config (asymmetry key)"));
            }
            if points == 0 {
                return Err(config_error("--points must be at least 1"));
            }
            cfg.sweep = Some(Sweep { param: "asymmetry".into(), from, to, points });
            cfg.check().map_err(|e| config_error(e.0))?;
            let rows = run_scenario(&cfg, jobs);
            let table = result_table(&cfg, &["asymmetry"], &rows, provenance(&cfg, "sweep-asymmetry", &notes));
            write_table(&cli, &cfg, &table)?;
            finish(&rows)
        }
        Command::SweepCooperativity { from, to, points, x_tol } => {
            if cfg.group != Group::Effective {
                return Err(config_error("sweep-cooperativity needs an effective-model config (c_minus key)"));
            }
            if points == 0 || !(from > 0.0 && to > 0.0) || !(x_tol > 0.0) {
                return Err(config_error("need --points ≥ 1, positive --from/--to and --x-tol"));
            }
            let cs: Vec<f64> = if points == 1 {
                vec![from]
            } else {
                (0..points).map(|i| from * (to / from).powf(i as f64 / (points - 1) as f64)).collect()
            };
            let rows = sweep_cooperativity(&cfg, &cs, x_tol, jobs);
            let mut extra = notes.clone();
            extra.push(format!("c_minus log-spaced from {from:?} to {to:?}, {points} points; asymmetry tolerance {x_tol:e}"));
            extra.push("tms_db = -log10(duan / 1)".into());
            let table = result_table(&cfg, &["c_minus", "asymmetry", "tms_db"], &rows, provenance(&cfg, "sweep-cooperativity", &extra));
            write_table(&cli, &cfg, &table)?;
            finish(&rows)
        }
        Command::Spectrum { points, half_width } => {
            let base: Vec<(&str, f64)> = cfg.sweep.iter().map(|s| (s.param.as_str(), s.from)).collect();
            let (_, model) = cfg.model_at(&base).map_err(|e| config_error(e.to_string()))?;
            let grid = match (points, half_width) {
                (None, None) => default_grid(&model),
                (n, l) => {
                    let n = n.unwrap_or(2001);
                    let l = l.unwrap_or(8.0 * model.omega);
                    if n < 2 || !(l > 0.0) {
                        return Err(config_error("--points must be ≥ 2 and --half-width positive"));
                    }
                    (0..n).map(|i| -l + 2.0 * l * i as f64 / (n - 1) as f64).collect()
                }
            };
            let trace = output_spectrum(&model, &grid).map_err(|e| Failure(EXIT_ALL_FAILED, e.to_string()))?;
            let mut extra = notes.clone();
            extra.push("spectrum in units of 1/kappa, omega in units of kappa".into());
            let table = Table {
                provenance: provenance(&cfg, "spectrum", &extra),
                header: vec!["omega".into(), "spectrum".into()],
                rows: trace.omega.iter().zip(&trace.values).map(|(w, s)| vec![fmt_num(*w), fmt_num(*s)]).collect(),
            };
            write_table(&cli, &cfg, &table)
        }
        Command::FloquetCompare { skip_ode } => {
            let base: Vec<(&str, f64)> = cfg.sweep.iter().map(|s| (s.param.as_str(), s.from)).collect();
            let (setup, _) = cfg.model_at(&base).map_err(|e| config_error(e.to_string()))?;
            if cfg.cr_at(&base, setup.as_ref()).is_err() {
                return Err(config_error("floquet-compare needs counter-rotating frequencies (cr_omega_m, or cr_delta and cr_omega_1)"));
            }
            let rows = floquet_compare(&cfg, !skip_ode, jobs);
            let (name, _) = tmss::scenario::points(&cfg);
            write_table(&cli, &cfg, &result_table(&cfg, &[&name], &rows, provenance(&cfg, "floquet-compare", &notes)))?;
            finish(&rows)
        }
    }
}
