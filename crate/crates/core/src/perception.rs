//! Scan segmentation: raw ranges to labeled left/right wall polylines.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{path_length, Point2, Polyline};
use crate::sim::LidarScan;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PerceptionError {
    #[error("scan has no usable returns in front of the vehicle")]
    EmptyScan,
    #[error("no wall candidates on either side")]
    NoWalls,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegmentationParams {
    pub base_break_threshold: f64,
    /// Scales the break threshold with the weighted local point spacing.
    pub adaptive_gain: f64,
    /// Odd number of spacings in the triangular weighted mean.
    pub weight_window: usize,
    pub min_segment_points: usize,
    pub min_segment_length: f64,
    pub max_segment_distance: f64,
    /// Largest accepted angle between a segment chord and the heading.
    pub max_segment_angle: f64,
}

impl Default for SegmentationParams {
    fn default() -> Self {
        Self {
            base_break_threshold: 0.10,
            adaptive_gain: 2.0,
            weight_window: 7,
            min_segment_points: 5,
            min_segment_length: 0.30,
            max_segment_distance: 10.0,
            max_segment_angle: 80f64.to_radians(),
        }
    }
}

/// A run of consecutive scan points believed to belong to one wall, in the
/// vehicle frame (x forward, y left).
#[derive(Debug, Clone, PartialEq)]
pub struct WallSegment {
    pub points: Vec<Point2>,
    /// Undirected chord orientation in (-pi/2, pi/2].
    pub chord_angle: f64,
    pub mean_distance: f64,
    pub arc_length: f64,
}

impl WallSegment {
    pub fn new(points: Vec<Point2>) -> Self {
        assert!(!points.is_empty(), "wall segment needs at least one point");
        let chord = *points.last().unwrap() - points[0];
        let mean_distance = points.iter().map(|p| p.norm()).sum::<f64>() / points.len() as f64;
        Self {
            chord_angle: fold_orientation(chord.angle()),
            mean_distance,
            arc_length: path_length(&points),
            points,
        }
    }

    /// The point closest to the vehicle origin.
    pub fn nearest_point(&self) -> Point2 {
        *self
            .points
            .iter()
            .min_by(|a, b| a.norm_sq().total_cmp(&b.norm_sq()))
            .expect("non-empty")
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Folds a direction angle onto an undirected orientation in (-pi/2, pi/2].
fn fold_orientation(angle: f64) -> f64 {
    let mut a = angle;
    while a > FRAC_PI_2 {
        a -= std::f64::consts::PI;
    }
    while a <= -FRAC_PI_2 {
        a += std::f64::consts::PI;
    }
    a
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct WallPair {
    pub left: Option<WallSegment>,
    pub right: Option<WallSegment>,
}

impl WallPair {
    pub fn both(&self) -> Option<(&WallSegment, &WallSegment)> {
        self.left.as_ref().zip(self.right.as_ref())
    }
}

/// Converts returns to Cartesian points in the sensor frame, dropping
/// no-return beams and everything behind the vehicle.
pub fn scan_to_points(scan: &LidarScan) -> Result<Polyline, PerceptionError> {
    let pts = (0..scan.len())
        .filter(|&i| scan.is_return(i))
        .map(|i| Point2::from_polar(scan.ranges[i], scan.angle(i)))
        .filter(|p| p.x >= 0.0);
    Polyline::from_points_dedup(pts).map_err(|_| PerceptionError::EmptyScan)
}

/// Splits consecutive points wherever their gap exceeds the adaptive
/// threshold `base + gain * W_i`, with `W_i` the triangular-weighted mean of
/// the neighbouring gaps centered at gap `i`.
pub fn segment_scan(points: &[Point2], params: &SegmentationParams) -> Vec<WallSegment> {
    if points.is_empty() {
        return Vec::new();
    }
    let gaps: Vec<f64> = points.windows(2).map(|w| w[0].distance(w[1])).collect();
    let half = params.weight_window.max(1) as isize / 2;
    let mut segments = Vec::new();
    let mut current = vec![points[0]];
    for (i, &gap) in gaps.iter().enumerate() {
        let mut num = 0.0;
        let mut den = 0.0;
        for k in -half..=half {
            let j = i as isize + k;
            if j < 0 || j >= gaps.len() as isize {
                continue;
            }
            let w = (half + 1 - k.abs()) as f64;
            num += w * gaps[j as usize];
            den += w;
        }
        let threshold = params.base_break_threshold + params.adaptive_gain * num / den;
        if gap > threshold {
            segments.push(WallSegment::new(std::mem::take(&mut current)));
        }
        current.push(points[i + 1]);
    }
    segments.push(WallSegment::new(current));
    segments
}

/// Drops segments that are too sparse, too short, too far away or too
/// steep relative to the heading.
pub fn filter_segments(segments: Vec<WallSegment>, params: &SegmentationParams) -> Vec<WallSegment> {
    segments
        .into_iter()
        .filter(|s| {
            s.len() >= params.min_segment_points
                && s.arc_length >= params.min_segment_length
                && s.mean_distance <= params.max_segment_distance
                && s.chord_angle.abs() <= params.max_segment_angle
        })
        .collect()
}

/// Picks the longest candidate on each side of the vehicle.
///
/// Segments crossing the forward axis are split there first, so a selected
/// wall always lies on its own side.
pub fn select_walls(segments: &[WallSegment]) -> Result<WallPair, PerceptionError> {
    let mut pair = WallPair::default();
    for piece in segments.iter().flat_map(split_at_axis) {
        let near = piece.nearest_point();
        let is_left = if near.y != 0.0 {
            near.y > 0.0
        } else {
            piece.points.iter().map(|p| p.y).sum::<f64>() >= 0.0
        };
        let slot = if is_left { &mut pair.left } else { &mut pair.right };
        let better = match slot {
            None => true,
            Some(cur) => {
                piece.arc_length > cur.arc_length
                    || (piece.arc_length == cur.arc_length && piece.mean_distance < cur.mean_distance)
            }
        };
        if better {
            *slot = Some(piece);
        }
    }
    if pair.left.is_none() && pair.right.is_none() {
        return Err(PerceptionError::NoWalls);
    }
    Ok(pair)
}

/// Splits a segment into runs whose points share the sign of y. Pieces with
/// fewer than two points are discarded.
fn split_at_axis(seg: &WallSegment) -> Vec<WallSegment> {
    let mut pieces = Vec::new();
    let mut run: Vec<Point2> = Vec::new();
    let mut sign = 0.0;
    for &p in &seg.points {
        let s = if p.y > 0.0 {
            1.0
        } else if p.y < 0.0 {
            -1.0
        } else {
            0.0
        };
        if s != 0.0 && sign != 0.0 && s != sign {
            pieces.push(std::mem::take(&mut run));
        }
        if s != 0.0 {
            sign = s;
        }
        run.push(p);
    }
    pieces.push(run);
    if pieces.len() == 1 {
        return vec![seg.clone()];
    }
    pieces
        .into_iter()
        .filter(|r| r.len() >= 2)
        .map(WallSegment::new)
        .collect()
}
