use serde::{Deserialize, Serialize};

use super::{inward_normals, joined_wall, prepare_wall, PlanningError, SmoothingParams, WidthProfile};
use crate::geometry::{GeometryError, Point2, Polyline};
use crate::perception::{WallPair, WallSegment};

/// Target number of centerline points after decimation.
pub const CENTERLINE_POINTS: usize = 50;
const NORMAL_STENCIL: usize = 2;
const FOLD_RATIO: f64 = 0.9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WallSide {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourceSide {
    Left,
    Right,
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Centerline {
    /// Vehicle-frame points ordered away from the vehicle.
    pub points: Polyline,
    pub source_side: SourceSide,
    /// The wall that was offset.
    pub offset_side: WallSide,
}

/// Offsets the more representative wall by half the local track width.
pub fn generate_centerline(walls: &WallPair, width: &WidthProfile, params: &SmoothingParams) -> Result<Centerline, PlanningError> {
    if !(width.last_valid > 0.0) {
        return Err(PlanningError::InvalidWidth(width.last_valid));
    }
    let (seg, mut side, source) = representative(walls).ok_or(PlanningError::NoWalls)?;
    let res = params.resolution;
    let wall = match joined_wall(walls) {
        Some(points) => {
            let near = points.iter().min_by(|a, b| a.norm_sq().total_cmp(&b.norm_sq())).copied();
            if let Some(p) = near {
                side = if p.y >= 0.0 { WallSide::Left } else { WallSide::Right };
            }
            prepare_wall(&points, res)
        }
        None => prepare_wall(&seg.points, res),
    };
    if wall.len() < 2 {
        return Err(GeometryError::TooFewPoints { got: wall.len(), need: 2 }.into());
    }
    let normals = inward_normals(&wall, NORMAL_STENCIL, side == WallSide::Left);
    let radius = (3.0 * res).max(0.5);
    let offsets: Vec<(Point2, f64)> = wall
        .iter()
        .zip(&normals)
        .map(|(&p, &n)| {
            let half = 0.5 * width.width_near(p, radius).unwrap_or(width.last_valid);
            (p + n * half, half)
        })
        .collect();
    // Offsetting a concave corner folds the curve over itself; the folded
    // part comes closer to the wall than the offset distance.
    let mut center: Vec<Point2> = offsets
        .into_iter()
        .filter(|&(c, half)| wall.iter().all(|q| q.distance(c) >= FOLD_RATIO * half))
        .map(|(c, _)| c)
        .collect();

    let start = center
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.norm_sq().total_cmp(&b.1.norm_sq()))
        .map(|(i, _)| i)
        .unwrap_or(0);
    center.drain(..start);
    center.dedup_by(|b, a| a.distance(*b) <= 1e-6);
    let center = decimate(center, CENTERLINE_POINTS);
    if center.len() < 3 {
        return Err(GeometryError::TooFewPoints { got: center.len(), need: 3 }.into());
    }
    Ok(Centerline {
        points: Polyline::new(center)?,
        source_side: source,
        offset_side: side,
    })
}

fn representative(walls: &WallPair) -> Option<(&WallSegment, WallSide, SourceSide)> {
    match (&walls.left, &walls.right) {
        (Some(l), Some(r)) => {
            let left_wins = l.arc_length > r.arc_length || (l.arc_length == r.arc_length && l.len() >= r.len());
            Some(if left_wins {
                (l, WallSide::Left, SourceSide::Both)
            } else {
                (r, WallSide::Right, SourceSide::Both)
            })
        }
        (Some(l), None) => Some((l, WallSide::Left, SourceSide::Left)),
        (None, Some(r)) => Some((r, WallSide::Right, SourceSide::Right)),
        (None, None) => None,
    }
}

/// Evenly spaced index subsequence keeping both ends.
fn decimate(points: Vec<Point2>, budget: usize) -> Vec<Point2> {
    let n = points.len();
    if n <= budget {
        return points;
    }
    (0..budget)
        .map(|k| points[(k as f64 * (n - 1) as f64 / (budget - 1) as f64).round() as usize])
        .collect()
}
