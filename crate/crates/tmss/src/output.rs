//! CSV tables with `#` provenance lines ahead of the header.

use std::io::{self, Write};

use crate::config::{Group, ScenarioConfig};
use crate::scenario::{ResultRow, METRIC_COLUMNS};

/// 12 significant digits, locale-free; empty for NaN (missing values).
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        String::new()
    } else if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x:.11e}")
    }
}

pub struct Table {
    pub provenance: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn write_to<W: Write>(&self, mut out: W) -> io::Result<()> {
        for line in &self.provenance {
            writeln!(out, "# {line}")?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()
    }
}

pub fn provenance(cfg: &ScenarioConfig, command: &str, extra: &[String]) -> Vec<String> {
    let mut p = vec![
        format!("tmss {}", env!("CARGO_PKG_VERSION")),
        format!("command: {command}"),
        format!("solver: {}", cfg.solver.name()),
        format!("tol: {:e}", cfg.tol),
        format!("group: {}", if cfg.group == Group::Effective { "effective (units of kappa)" } else { "physical" }),
    ];
    let swept = cfg.sweep.as_ref().map(|s| s.param.as_str());
    for (k, v) in cfg.numbers.iter().filter(|(k, _)| Some(k.as_str()) != swept) {
        p.push(format!("{k} = {v:?}"));
    }
    if let Some(s) = &cfg.sweep {
        p.push(format!("sweep: {} from {:?} to {:?}, {} points", s.param, s.from, s.to, s.points));
    }
    p.extend(extra.iter().cloned());
    p
}

/// Parameter columns, selected metric columns, solver and row status.
pub fn result_table(cfg: &ScenarioConfig, params: &[&str], rows: &[ResultRow], provenance: Vec<String>) -> Table {
    let selected: Vec<usize> =
        METRIC_COLUMNS.iter().enumerate().filter(|(_, c)| cfg.outputs.iter().any(|o| o == *c)).map(|(i, _)| i).collect();
    let mut header: Vec<String> = params.iter().map(|s| s.to_string()).collect();
    header.extend(selected.iter().map(|&i| METRIC_COLUMNS[i].to_string()));
    header.push("solver".into());
    header.push("status".into());
    let rows = rows
        .iter()
        .map(|r| {
            let mut cells: Vec<String> = r.params.iter().map(|&x| fmt_num(x)).collect();
            match &r.outcome {
                Ok(m) => cells.extend(selected.iter().map(|&i| fmt_num(m[i]))),
                Err(_) => cells.extend(selected.iter().map(|_| String::new())),
            }
            cells.push(r.solver.name().into());
            cells.push(match &r.outcome {
                Ok(_) => "ok".into(),
                Err(e) => format!("failed: {e}"),
            });
            cells
        })
        .collect();
    Table { provenance, header, rows }
}
