//! Session runner, sweeps, track generation and file formats.

mod config;
mod scanlog;
mod session;
mod sweep;
mod tracks;

pub use config::{load_config, parse_config, parse_ftg, parse_stanley, ControllerConfig, ControllerKind, FTG_KEYS, STANLEY_KEYS};
pub use scanlog::{list_scans, plan_debug, read_scan, write_scan, PlanDebugSummary, ScanRecorder, SPLINE_DUMP_STEP};
pub use session::{run_session, simulate, LapReport, Platform, RunLimits, SessionConfig, SessionEnd, DEFAULT_TIMEOUT, TRACE_HEADER};
pub use sweep::{changed_keys, parse_grid, run_sweep, write_sweep_csv, Overrides, SweepRow};
pub use tracks::{generate_track, TrackKind, TrackParams};

use std::path::Path;

use thiserror::Error;

use crate::sim::SimError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Io(String),
    #[error("cannot parse track: {0}")]
    TrackParse(String),
    #[error("cannot parse config: {0}")]
    ConfigParse(String),
    #[error("unknown config key '{0}'")]
    UnknownKey(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl HarnessError {
    pub(crate) fn io(path: &Path, e: std::io::Error) -> Self {
        Self::Io(format!("{}: {e}", path.display()))
    }
}
