//! Follow-The-Gap reactive baseline.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sim::{ControlCommand, LidarScan};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FtgError {
    #[error("no free gap in front of the vehicle")]
    NoGap,
    #[error("invalid follow-the-gap parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FtgParams {
    pub bubble_radius: f64,
    pub max_considered_range: f64,
    /// Shortest run of free beams accepted as a gap.
    pub min_gap_width: usize,
    pub speed_straight: f64,
    pub speed_turn: f64,
    pub steer_gain: f64,
}

impl Default for FtgParams {
    fn default() -> Self {
        Self {
            bubble_radius: 0.35,
            max_considered_range: 4.0,
            min_gap_width: 10,
            speed_straight: 3.5,
            speed_turn: 1.5,
            steer_gain: 0.8,
        }
    }
}

impl FtgParams {
    pub fn validate(&self) -> Result<(), FtgError> {
        let v = [self.bubble_radius, self.max_considered_range, self.speed_straight, self.speed_turn, self.steer_gain];
        if v.iter().any(|x| !(x.is_finite() && *x > 0.0)) || self.min_gap_width == 0 {
            return Err(FtgError::InvalidParams("all parameters must be positive".into()));
        }
        Ok(())
    }
}

/// The chosen gap as an inclusive beam index range plus the target angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub start: usize,
    pub end: usize,
    pub target_angle: f64,
}

/// Angle of beam `i` measured from the scan center, so mirrored beams get
/// exactly opposite angles.
fn centered_angle(scan: &LidarScan, i: usize) -> f64 {
    (i as f64 - (scan.len() - 1) as f64 / 2.0) * scan.angular_increment
}

/// Finds the widest free gap among the forward-facing beams.
pub fn find_gap(scan: &LidarScan, params: &FtgParams) -> Result<Gap, FtgError> {
    let n = scan.len();
    let front: Vec<usize> = (0..n).filter(|&i| centered_angle(scan, i).abs() <= FRAC_PI_2 + 1e-12).collect();
    let (Some(&lo), Some(&hi)) = (front.first(), front.last()) else {
        return Err(FtgError::NoGap);
    };
    let cap = params.max_considered_range;
    let mut r: Vec<f64> = (lo..=hi)
        .map(|i| if scan.is_return(i) { scan.ranges[i].min(cap) } else { cap })
        .collect();

    let r_min = r.iter().copied().fold(f64::INFINITY, f64::min);
    if r_min < cap {
        let half = (params.bubble_radius / r_min).min(1.0).asin();
        let reach = (half / scan.angular_increment).floor() as usize;
        let closest: Vec<usize> = (0..r.len()).filter(|&k| r[k] == r_min).collect();
        for k in closest {
            for j in k.saturating_sub(reach)..=(k + reach).min(r.len() - 1) {
                r[j] = 0.0;
            }
        }
    }

    // Widest run of free beams; ties go to the run nearer the center, then
    // to the left.
    let mut best: Option<(usize, usize)> = None;
    let mut k = 0;
    while k < r.len() {
        if r[k] == 0.0 {
            k += 1;
            continue;
        }
        let start = k;
        while k < r.len() && r[k] > 0.0 {
            k += 1;
        }
        let end = k - 1;
        if end + 1 - start < params.min_gap_width {
            continue;
        }
        let better = match best {
            None => true,
            Some((s0, e0)) => {
                let (w, w0) = (end - start, e0 - s0);
                let off = |s: usize, e: usize| centered_angle(scan, lo + s) + centered_angle(scan, lo + e);
                w > w0 || (w == w0 && off(start, end).abs() <= off(s0, e0).abs())
            }
        };
        if better {
            best = Some((start, end));
        }
    }
    let (start, end) = best.ok_or(FtgError::NoGap)?;

    // Deepest beam in the gap, nearest the gap center; two equally near
    // candidates are averaged.
    let deepest = r[start..=end].iter().copied().fold(0.0, f64::max);
    let mid = (start + end) as f64 / 2.0;
    let dist = |k: usize| (k as f64 - mid).abs();
    let nearest = (start..=end).filter(|&k| r[k] == deepest).map(dist).fold(f64::INFINITY, f64::min);
    let picks: Vec<f64> = (start..=end)
        .filter(|&k| r[k] == deepest && dist(k) == nearest)
        .map(|k| centered_angle(scan, lo + k))
        .collect();
    let target_angle = picks.iter().sum::<f64>() / picks.len() as f64;
    Ok(Gap {
        start: lo + start,
        end: lo + end,
        target_angle,
    })
}

/// Steers toward the widest gap; slows down in proportion to the turn.
pub fn follow_the_gap(scan: &LidarScan, params: &FtgParams, delta_max: f64) -> Result<ControlCommand, FtgError> {
    let gap = find_gap(scan, params)?;
    let a = gap.target_angle;
    Ok(ControlCommand {
        delta_target: (params.steer_gain * a).clamp(-delta_max, delta_max),
        v_target: (params.speed_turn + (params.speed_straight - params.speed_turn) * a.cos()).max(0.0),
    })
}

/// Like [`follow_the_gap`], but a missing gap yields a full stop.
pub fn ftg_command(scan: &LidarScan, params: &FtgParams, delta_max: f64) -> ControlCommand {
    follow_the_gap(scan, params, delta_max).unwrap_or(ControlCommand::STOP)
}
