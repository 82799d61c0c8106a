//! Raw scan logs and per-stage planner dumps.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::HarnessError;
use crate::planning::{plan_pipeline, PlannerParams, WidthProfile};
use crate::sim::LidarScan;

/// Spacing of the spline samples in a stage dump.
pub const SPLINE_DUMP_STEP: f64 = 0.05;

/// Writes every `every`-th scan of a session as `scan_<step>.json`.
#[derive(Debug, Clone)]
pub struct ScanRecorder {
    dir: PathBuf,
    every: u64,
    written: usize,
}

impl ScanRecorder {
    pub fn new(dir: impl Into<PathBuf>, every: u64) -> Result<Self, HarnessError> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir).map_err(|e| HarnessError::io(&dir, e))?;
        Ok(Self { dir, every: every.max(1), written: 0 })
    }

    pub fn record(&mut self, step: u64, scan: &LidarScan) -> Result<(), HarnessError> {
        if !step.is_multiple_of(self.every) {
            return Ok(());
        }
        let path = self.dir.join(format!("scan_{step:06}.json"));
        write_scan(&path, scan)?;
        self.written += 1;
        Ok(())
    }

    pub fn written(&self) -> usize {
        self.written
    }
}

pub fn write_scan(path: &Path, scan: &LidarScan) -> Result<(), HarnessError> {
    let text = serde_json::to_string(scan).map_err(|e| HarnessError::Io(e.to_string()))?;
    std::fs::write(path, text).map_err(|e| HarnessError::io(path, e))
}

pub fn read_scan(path: &Path) -> Result<LidarScan, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| HarnessError::InvalidParams(format!("{}: {e}", path.display())))
}

/// Scan files of a log directory in name order.
pub fn list_scans(dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| HarnessError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    Ok(files)
}

#[derive(Serialize)]
struct StageRow<'a> {
    stage: &'a str,
    index: usize,
    x: f64,
    y: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanDebugSummary {
    pub planned: usize,
    pub failed: Vec<(String, String)>,
}

/// Replays a scan log through the planner, carrying the width memory from
/// scan to scan, and writes one `<scan>.csv` of stage geometry per scan.
pub fn plan_debug(scan_dir: &Path, planner: &PlannerParams, out_dir: &Path) -> Result<PlanDebugSummary, HarnessError> {
    std::fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir, e))?;
    let mut width = WidthProfile::default();
    let mut summary = PlanDebugSummary { planned: 0, failed: Vec::new() };
    for path in list_scans(scan_dir)? {
        let scan = read_scan(&path)?;
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let plan = match plan_pipeline(&scan, &width, planner) {
            Ok(plan) => plan,
            Err(e) => {
                summary.failed.push((stem, e.to_string()));
                continue;
            }
        };
        width = plan.width.clone();
        let out = out_dir.join(format!("{stem}.csv"));
        let mut w = csv::Writer::from_path(&out)?;
        for (stage, pts) in plan.stages.iter() {
            for (index, p) in pts.iter().enumerate() {
                w.serialize(StageRow { stage, index, x: p.x, y: p.y })?;
            }
        }
        for (index, cp) in plan.spline.sample(SPLINE_DUMP_STEP).iter().enumerate() {
            w.serialize(StageRow { stage: "spline", index, x: cp.position.x, y: cp.position.y })?;
        }
        w.flush().map_err(|e| HarnessError::io(&out, e))?;
        summary.planned += 1;
    }
    Ok(summary)
}
