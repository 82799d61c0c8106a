//! Closed-loop sessions: sense, control, actuate until the laps are done.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::{load_config, ControllerConfig, ControllerKind};
use super::scanlog::ScanRecorder;
use super::HarnessError;
use crate::control::{control_step, ControlContext, ControllerMemory};
use crate::ftg::ftg_command;
use crate::planning::PlannerParams;
use crate::sim::{ControlCommand, SensorConfig, Track, VehicleParams, World, CONTROL_DT};

pub const TRACE_HEADER: [&str; 10] = ["t", "x", "y", "psi", "v", "delta", "delta_target", "v_target", "lap", "collision"];
pub const DEFAULT_TIMEOUT: f64 = 300.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SessionConfig {
    pub track_path: PathBuf,
    pub controller: ControllerKind,
    pub config_path: PathBuf,
    pub laps: usize,
    pub seed: u64,
    pub timeout: f64,
    pub trace_path: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SessionEnd {
    Completed,
    Collision,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LapReport {
    pub lap_times: Vec<f64>,
    pub collisions: usize,
    pub completed: bool,
    pub avg_speed: f64,
    pub total_distance: f64,
    pub total_time: f64,
    pub end: SessionEnd,
}

impl LapReport {
    /// Mean over laps after the first; the first lap includes the standing
    /// start. A single lap is its own steady state.
    pub fn steady_state_mean(&self) -> Option<f64> {
        let laps = if self.lap_times.len() > 1 { &self.lap_times[1..] } else { &self.lap_times[..] };
        (!laps.is_empty()).then(|| laps.iter().sum::<f64>() / laps.len() as f64)
    }
}

/// Fixed vehicle and sensor setup shared by every session.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Platform {
    pub vehicle: VehicleParams,
    pub sensor: SensorConfig,
    pub planner: PlannerParams,
}

#[derive(Serialize)]
struct TraceRow {
    t: f64,
    x: f64,
    y: f64,
    psi: f64,
    v: f64,
    delta: f64,
    delta_target: f64,
    v_target: f64,
    lap: usize,
    collision: u8,
}

/// Seed for the scan noise of one control step.
fn step_seed(seed: u64, step: u64) -> u64 {
    seed ^ step.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

pub fn run_session(cfg: &SessionConfig) -> Result<LapReport, HarnessError> {
    let text = std::fs::read_to_string(&cfg.track_path).map_err(|e| HarnessError::io(&cfg.track_path, e))?;
    let track = Track::from_json(&text).map_err(|e| HarnessError::TrackParse(e.to_string()))?;
    let controller = load_config(cfg.controller, &cfg.config_path)?;
    let mut trace = match &cfg.trace_path {
        Some(p) => Some(csv_writer(p)?),
        None => None,
    };
    let report = simulate(
        &track,
        &controller,
        &Platform::default(),
        &RunLimits { laps: cfg.laps, seed: cfg.seed, timeout: cfg.timeout },
        trace.as_mut().map(|w| w as &mut dyn Write),
        None,
    )?;
    if let Some(mut w) = trace {
        w.flush().map_err(|e| HarnessError::io(cfg.trace_path.as_deref().unwrap(), e))?;
    }
    Ok(report)
}

fn csv_writer(path: &Path) -> Result<std::io::BufWriter<std::fs::File>, HarnessError> {
    let f = std::fs::File::create(path).map_err(|e| HarnessError::io(path, e))?;
    Ok(std::io::BufWriter::new(f))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunLimits {
    pub laps: usize,
    pub seed: u64,
    pub timeout: f64,
}

/// Runs one session on an in-memory track. `trace` receives one CSV row per
/// control step; `scans` optionally records raw scans.
pub fn simulate(
    track: &Track,
    controller: &ControllerConfig,
    platform: &Platform,
    limits: &RunLimits,
    trace: Option<&mut dyn Write>,
    mut scans: Option<&mut ScanRecorder>,
) -> Result<LapReport, HarnessError> {
    if limits.laps == 0 {
        return Err(HarnessError::InvalidParams("laps must be at least 1".into()));
    }
    if !(limits.timeout > 0.0) {
        return Err(HarnessError::InvalidParams("timeout must be positive".into()));
    }
    let mut world = World::new(track.clone(), platform.vehicle, platform.sensor)?;
    let mut trace = trace.map(|w| csv::WriterBuilder::new().has_headers(false).from_writer(w));
    if let Some(w) = trace.as_mut() {
        w.write_record(TRACE_HEADER)?;
    }
    let ctx = match controller {
        ControllerConfig::Stanley(config) => Some(ControlContext {
            config: *config,
            planner: platform.planner,
            vehicle: platform.vehicle,
            mount: platform.sensor.mount_offset,
        }),
        ControllerConfig::Ftg(_) => None,
    };
    let mut memory = ControllerMemory::default();
    let mut lap_stamps = vec![0.0];
    let mut end = SessionEnd::Timeout;
    let max_steps = (limits.timeout / CONTROL_DT).ceil() as u64;
    for step in 0..max_steps {
        let scan = world.sense(step_seed(limits.seed, step));
        if let Some(rec) = scans.as_deref_mut() {
            rec.record(step, &scan)?;
        }
        let cmd: ControlCommand = match (controller, &ctx) {
            (ControllerConfig::Stanley(_), Some(ctx)) => {
                let (cmd, next) = control_step(&world.state, &scan, std::mem::take(&mut memory), ctx);
                memory = next;
                cmd
            }
            (ControllerConfig::Ftg(p), _) => ftg_command(&scan, p, platform.vehicle.delta_max),
            _ => unreachable!("stanley sessions always carry a context"),
        };
        let outcome = world.advance(&cmd)?;
        if let Some(t) = outcome.lap_time_stamp {
            lap_stamps.push(t);
        }
        let laps_done = lap_stamps.len() - 1;
        if let Some(w) = trace.as_mut() {
            let s = &world.state;
            w.serialize(TraceRow {
                t: s.t,
                x: s.pose.position.x,
                y: s.pose.position.y,
                psi: s.pose.psi,
                v: s.v,
                delta: s.delta_measured,
                delta_target: cmd.delta_target,
                v_target: cmd.v_target,
                lap: laps_done,
                collision: outcome.collision as u8,
            })?;
        }
        if outcome.collision {
            end = SessionEnd::Collision;
            break;
        }
        if laps_done >= limits.laps {
            end = SessionEnd::Completed;
            break;
        }
    }
    if let Some(mut w) = trace {
        w.flush().map_err(|e| HarnessError::Io(format!("trace: {e}")))?;
    }
    let lap_times: Vec<f64> = lap_stamps.windows(2).map(|w| w[1] - w[0]).collect();
    let total_time = world.state.t;
    Ok(LapReport {
        lap_times,
        collisions: (end == SessionEnd::Collision) as usize,
        completed: end == SessionEnd::Completed,
        avg_speed: if total_time > 0.0 { world.odometer / total_time } else { 0.0 },
        total_distance: world.odometer,
        total_time,
        end,
    })
}
