//! Scenario files: flat `key = value` text or a JSON object with the same keys.
//!
//! A scenario uses exactly one parameter group. The effective group gives
//! the reduced model directly in units of κ; the physical group gives
//! frequencies, rates and drive amplitudes from which the model is derived.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::Value;
use tmss_core::model::{effective_model, CounterRotating, DriveScheme, EffectiveModel, PhysicalSetup, Topology};

use crate::scenario::METRIC_COLUMNS;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{0}")]
pub struct ConfigError(pub String);

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Solver {
    Adiabatic,
    LyapunovRwa,
    Floquet,
    OdeOracle,
}

impl Solver {
    pub const ALL: [Solver; 4] = [Solver::Adiabatic, Solver::LyapunovRwa, Solver::Floquet, Solver::OdeOracle];

    pub fn name(self) -> &'static str {
        match self {
            Solver::Adiabatic => "adiabatic",
            Solver::LyapunovRwa => "lyapunov_rwa",
            Solver::Floquet => "floquet",
            Solver::OdeOracle => "ode_oracle",
        }
    }

    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        Solver::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| ConfigError(format!("unknown solver '{s}' (expected adiabatic, lyapunov_rwa, floquet or ode_oracle)")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: String,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

impl Sweep {
    /// Evenly spaced values, endpoints included.
    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![self.from];
        }
        let step = (self.to - self.from) / (self.points - 1) as f64;
        (0..self.points).map(|i| if i + 1 == self.points { self.to } else { self.from + step * i as f64 }).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Effective,
    Physical,
}

/// (key, default); `None` marks a required key.
const EFFECTIVE: &[(&str, Option<f64>)] =
    &[("asymmetry", None), ("c_minus", None), ("omega", None), ("gamma", None), ("nbar", Some(0.0)), ("gm_ratio", Some(0.0))];

/// Optional counter-rotating frequencies for the effective group (units of κ).
const COUNTER_ROTATING: &[&str] = &["cr_omega_m", "cr_delta", "cr_omega_1", "cr_d"];

const PHYSICAL: &[(&str, Option<f64>)] = &[
    ("omega_a", None),
    ("omega_b", None),
    ("omega_c", Some(0.0)),
    ("kappa", None),
    ("gamma_a", None),
    ("gamma_b", None),
    ("nbar_a", Some(0.0)),
    ("nbar_b", Some(0.0)),
    ("nbar_c", Some(0.0)),
    ("g_a", None),
    ("g_b", None),
];

const TWO_TONE: &[&str] = &["e_plus", "e_minus"];
const FOUR_TONE: &[&str] = &["e1_plus", "e1_minus", "e2_plus", "e2_minus", "frame_omega"];

const COMMON: &[&str] = &["solver", "tol", "sweep", "outputs", "output_path"];
const PHYSICAL_TEXT: &[&str] = &["topology", "drive"];

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub group: Group,
    /// Numeric parameters with defaults filled in.
    pub numbers: BTreeMap<String, f64>,
    pub topology: Topology,
    pub four_tone: bool,
    pub solver: Solver,
    pub tol: f64,
    pub sweep: Option<Sweep>,
    pub outputs: Vec<String>,
    pub output_path: Option<PathBuf>,
}

/// Reads `key = value` lines; `#` starts a comment.
pub fn parse_flat(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut out = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return err(format!("line {}: expected 'key = value'", n + 1));
        };
        let k = k.trim().to_string();
        if out.insert(k.clone(), v.trim().to_string()).is_some() {
            return err(format!("line {}: duplicate key '{k}'", n + 1));
        }
    }
    Ok(out)
}

/// Flattens a JSON object to the same string map as [`parse_flat`].
pub fn parse_json(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let value: Value = serde_json::from_str(text).map_err(|e| ConfigError(format!("invalid JSON: {e}")))?;
    let Value::Object(obj) = value else {
        return err("JSON config must be an object");
    };
    let mut out = BTreeMap::new();
    for (k, v) in obj {
        let s = match (k.as_str(), &v) {
            (_, Value::String(s)) => s.clone(),
            (_, Value::Number(n)) => n.to_string(),
            ("outputs", Value::Array(items)) => items
                .iter()
                .map(|i| i.as_str().map(str::to_string).ok_or_else(|| ConfigError("outputs must be strings".into())))
                .collect::<Result<Vec<_>, _>>()?
                .join(","),
            ("sweep", Value::Object(s)) => {
                let field = |name: &str| s.get(name).map(|v| v.to_string().trim_matches('"').to_string());
                match (field("param"), field("from"), field("to"), field("points")) {
                    (Some(p), Some(a), Some(b), Some(n)) => format!("{p} {a} {b} {n}"),
                    _ => return err("sweep object needs param, from, to and points"),
                }
            }
            _ => return err(format!("unsupported value for '{k}'")),
        };
        out.insert(k, s);
    }
    Ok(out)
}

fn number(key: &str, raw: &str) -> Result<f64, ConfigError> {
    match raw.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => err(format!("'{key}' must be a finite number, got '{raw}'")),
    }
}

fn parse_sweep(raw: &str) -> Result<Sweep, ConfigError> {
    let parts: Vec<&str> = raw.split_whitespace().collect();
    let [param, from, to, points] = parts[..] else {
        return err("sweep must be 'name from to points'");
    };
    let points = match points.parse::<usize>() {
        Ok(n) if n >= 1 => n,
        _ => return err(format!("sweep point count must be a positive integer, got '{points}'")),
    };
    Ok(Sweep { param: param.to_string(), from: number("sweep from", from)?, to: number("sweep to", to)?, points })
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{');
        let raw = if is_json { parse_json(&text)? } else { parse_flat(&text)? };
        Self::from_map(&raw)
    }

    pub fn from_map(raw: &BTreeMap<String, String>) -> Result<Self, ConfigError> {
        let is_effective = |k: &str| EFFECTIVE.iter().any(|(e, _)| *e == k) || COUNTER_ROTATING.contains(&k);
        let is_physical = |k: &str| {
            PHYSICAL.iter().any(|(e, _)| *e == k) || TWO_TONE.contains(&k) || FOUR_TONE.contains(&k) || PHYSICAL_TEXT.contains(&k)
        };
        for k in raw.keys() {
            if !is_effective(k) && !is_physical(k) && !COMMON.contains(&k.as_str()) {
                return err(format!("unknown key '{k}'"));
            }
        }
        let group = match (raw.keys().any(|k| is_effective(k)), raw.keys().any(|k| is_physical(k))) {
            (true, false) => Group::Effective,
            (false, true) => Group::Physical,
            (true, true) => return err("config mixes effective-model and physical-setup keys; use exactly one group"),
            (false, false) => return err("config has neither effective-model nor physical-setup keys"),
        };

        let sweep = raw.get("sweep").map(|s| parse_sweep(s)).transpose()?;
        let solver = raw.get("solver").map(|s| Solver::parse(s)).transpose()?.unwrap_or(Solver::LyapunovRwa);
        let tol = match raw.get("tol") {
            Some(t) => {
                let t = number("tol", t)?;
                if t <= 0.0 {
                    return err("'tol' must be positive");
                }
                t
            }
            None => 1e-9,
        };
        let outputs = match raw.get("outputs") {
            Some(list) => {
                let names: Vec<String> = list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
                for n in &names {
                    if !METRIC_COLUMNS.contains(&n.as_str()) {
                        return err(format!("unknown output '{n}'"));
                    }
                }
                names
            }
            None => METRIC_COLUMNS.iter().map(|s| s.to_string()).collect(),
        };

        let (topology, four_tone) = if group == Group::Physical {
            let topology = match raw.get("topology").map(String::as_str) {
                None | Some("two_mechanical") => Topology::TwoMechanicalOneCavity,
                Some("two_cavity") => Topology::TwoCavityOneMechanical,
                Some(t) => return err(format!("unknown topology '{t}' (expected two_mechanical or two_cavity)")),
            };
            let four_tone = match raw.get("drive").map(String::as_str) {
                None | Some("two_tone") => false,
                Some("four_tone") => true,
                Some(d) => return err(format!("unknown drive '{d}' (expected two_tone or four_tone)")),
            };
            (topology, four_tone)
        } else {
            (Topology::TwoMechanicalOneCavity, false)
        };

        let mut numbers = BTreeMap::new();
        let swept = sweep.as_ref().map(|s| s.param.as_str());
        let mut take = |key: &str, default: Option<f64>| -> Result<(), ConfigError> {
            match (raw.get(key), default) {
                (Some(v), _) => {
                    numbers.insert(key.to_string(), number(key, v)?);
                }
                (None, Some(d)) => {
                    numbers.insert(key.to_string(), d);
                }
                (None, None) if swept == Some(key) => {}
                (None, None) => return err(format!("missing required key '{key}'")),
            }
            Ok(())
        };
        match group {
            Group::Effective => {
                for (k, d) in EFFECTIVE {
                    take(k, *d)?;
                }
                for k in COUNTER_ROTATING {
                    if raw.contains_key(*k) {
                        take(k, None)?;
                    }
                }
            }
            Group::Physical => {
                for (k, d) in PHYSICAL {
                    take(k, *d)?;
                }
                let (needed, other) = if four_tone { (FOUR_TONE, TWO_TONE) } else { (TWO_TONE, FOUR_TONE) };
                for k in needed {
                    take(k, None)?;
                }
                if let Some(k) = other.iter().find(|k| raw.contains_key(**k)) {
                    return err(format!("'{k}' does not belong to the selected drive"));
                }
            }
        }

        if let Some(s) = &sweep {
            let known = match group {
                Group::Effective => EFFECTIVE.iter().any(|(k, _)| *k == s.param) || numbers.contains_key(&s.param),
                Group::Physical => numbers.contains_key(&s.param) || PHYSICAL.iter().any(|(k, _)| *k == s.param),
            };
            if !known {
                return err(format!("sweep parameter '{}' is not a recognized key of this config", s.param));
            }
        }

        let cfg = ScenarioConfig {
            group,
            numbers,
            topology,
            four_tone,
            solver,
            tol,
            sweep,
            outputs,
            output_path: raw.get("output_path").map(PathBuf::from),
        };
        cfg.check()?;
        Ok(cfg)
    }

    /// Validates the first sweep point and the solver's requirements.
    pub fn check(&self) -> Result<(), ConfigError> {
        let base: Vec<(&str, f64)> = self.sweep.iter().map(|s| (s.param.as_str(), s.from)).collect();
        let (setup, _) = self.model_at(&base).map_err(|e| ConfigError(format!("invalid parameters: {e}")))?;
        if self.cr_at(&base, setup.as_ref()).is_err() && self.solver == Solver::Floquet {
            return err("solver floquet needs counter-rotating frequencies (cr_omega_m, or cr_delta and cr_omega_1)");
        }
        Ok(())
    }

    pub fn value(&self, key: &str, overrides: &[(&str, f64)]) -> Option<f64> {
        overrides.iter().find(|(k, _)| *k == key).map(|(_, v)| *v).or_else(|| self.numbers.get(key).copied())
    }

    fn need(&self, key: &'static str, overrides: &[(&str, f64)]) -> tmss_core::Result<f64> {
        self.value(key, overrides).ok_or(tmss_core::Error::InvalidParameter { name: key, reason: "missing" })
    }

    /// Physical setup (physical group only) and effective model at one point.
    pub fn model_at(&self, overrides: &[(&str, f64)]) -> tmss_core::Result<(Option<PhysicalSetup>, EffectiveModel)> {
        let v = |k: &'static str| self.need(k, overrides);
        match self.group {
            Group::Effective => {
                let m = EffectiveModel::from_ratios(v("asymmetry")?, v("c_minus")?, v("gm_ratio")?, v("omega")?, v("gamma")?, v("nbar")?)?;
                Ok((None, m))
            }
            Group::Physical => {
                let drive = if self.four_tone {
                    DriveScheme::FourTone {
                        e1_plus: v("e1_plus")?,
                        e1_minus: v("e1_minus")?,
                        e2_plus: v("e2_plus")?,
                        e2_minus: v("e2_minus")?,
                        omega: v("frame_omega")?,
                    }
                } else {
                    DriveScheme::TwoTone { e_plus: v("e_plus")?, e_minus: v("e_minus")? }
                };
                let setup = PhysicalSetup {
                    topology: self.topology,
                    omega_a: v("omega_a")?,
                    omega_b: v("omega_b")?,
                    omega_c: v("omega_c")?,
                    kappa: v("kappa")?,
                    gamma_a: v("gamma_a")?,
                    gamma_b: v("gamma_b")?,
                    nbar_a: v("nbar_a")?,
                    nbar_b: v("nbar_b")?,
                    nbar_c: v("nbar_c")?,
                    g_a: v("g_a")?,
                    g_b: v("g_b")?,
                    drive,
                };
                let m = effective_model(&setup)?;
                Ok((Some(setup), m))
            }
        }
    }

    /// Counter-rotating frequencies, if the config provides them.
    pub fn cr_at(&self, overrides: &[(&str, f64)], setup: Option<&PhysicalSetup>) -> tmss_core::Result<CounterRotating> {
        if let Some(s) = setup {
            return CounterRotating::from_setup(s);
        }
        if let Some(wm) = self.value("cr_omega_m", overrides) {
            return Ok(CounterRotating::TwoTone { omega_m: wm });
        }
        match (self.value("cr_delta", overrides), self.value("cr_omega_1", overrides)) {
            (Some(d), Some(w1)) => Ok(CounterRotating::four_tone(d, w1, self.value("cr_d", overrides).unwrap_or(1.0))),
            _ => Err(tmss_core::Error::InvalidParameter { name: "cr_omega_m", reason: "no counter-rotating frequencies given" }),
        }
    }
}
