//! Parameter sweeps: one session per override set.

use std::io::Write;

use rayon::prelude::*;

use super::config::ControllerConfig;
use super::session::{simulate, LapReport, Platform, RunLimits};
use super::HarnessError;
use crate::sim::Track;

pub type Overrides = Vec<(String, f64)>;

/// Parses a grid file: one setting per line as whitespace-separated
/// `key=value` pairs. Blank lines and `#` comments are skipped; a line with
/// no pairs but a lone `-` stands for the unmodified base.
pub fn parse_grid(text: &str) -> Result<Vec<Overrides>, HarnessError> {
    let mut settings = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if line == "-" {
            settings.push(Vec::new());
            continue;
        }
        let mut set = Vec::new();
        for item in line.split_whitespace() {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| HarnessError::ConfigParse(format!("grid line {}: expected key=value, got '{item}'", n + 1)))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| HarnessError::ConfigParse(format!("grid line {}: '{v}' is not a number", n + 1)))?;
            set.push((k.trim().to_string(), v));
        }
        settings.push(set);
    }
    Ok(settings)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub setting_id: usize,
    pub config: ControllerConfig,
    pub report: LapReport,
}

/// Applies each override set to `base` and runs it with the same seed.
/// Every key is checked before any session starts. Parallel execution
/// returns the same rows in the same order.
pub fn run_sweep(
    base: &ControllerConfig,
    overrides: &[Overrides],
    track: &Track,
    platform: &Platform,
    limits: &RunLimits,
    parallel: bool,
) -> Result<Vec<SweepRow>, HarnessError> {
    let configs: Vec<ControllerConfig> = overrides
        .iter()
        .map(|set| {
            let mut cfg = *base;
            for (k, v) in set {
                cfg.set(k, *v)?;
            }
            Ok(cfg)
        })
        .collect::<Result<_, HarnessError>>()?;
    let run = |(i, cfg): (usize, &ControllerConfig)| -> Result<SweepRow, HarnessError> {
        let report = simulate(track, cfg, platform, limits, None, None)?;
        Ok(SweepRow { setting_id: i, config: *cfg, report })
    };
    if parallel {
        configs.par_iter().enumerate().map(run).collect()
    } else {
        configs.iter().enumerate().map(run).collect()
    }
}

/// Keys changed by any override set, in canonical config order.
pub fn changed_keys(base: &ControllerConfig, overrides: &[Overrides]) -> Vec<&'static str> {
    base.entries()
        .into_iter()
        .map(|(k, _)| k)
        .filter(|k| overrides.iter().any(|set| set.iter().any(|(o, _)| o == k)))
        .collect()
}

/// Writes `setting_id,<changed keys>,mean_lap_time,collisions,completed`.
/// The mean covers steady-state laps and is empty when no lap finished.
pub fn write_sweep_csv<W: Write>(out: W, keys: &[&str], rows: &[SweepRow]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["setting_id".to_string()];
    header.extend(keys.iter().map(|k| k.to_string()));
    header.extend(["mean_lap_time", "collisions", "completed"].map(String::from));
    w.write_record(&header)?;
    for row in rows {
        let mut rec = vec![row.setting_id.to_string()];
        for k in keys {
            rec.push(row.config.get(k)?.to_string());
        }
        rec.push(row.report.steady_state_mean().map(|m| m.to_string()).unwrap_or_default());
        rec.push(row.report.collisions.to_string());
        rec.push(row.report.completed.to_string());
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| HarnessError::Io(e.to_string()))?;
    Ok(())
}
