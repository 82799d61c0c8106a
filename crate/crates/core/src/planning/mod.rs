//! Local path planning: track width, centerline reconstruction and
//! post-processing into a spline.

mod centerline;
mod smoothing;
mod width;

pub use centerline::{generate_centerline, Centerline, SourceSide, WallSide};
pub use smoothing::{laplacian_smooth, opheim_simplify};
pub use width::{estimate_track_width, WidthProfile, WidthSample, DEFAULT_INITIAL_WIDTH, MAX_RELIABLE_WIDTH, MIN_RELIABLE_WIDTH};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, Point2};
use crate::perception::{filter_segments, scan_to_points, segment_scan, select_walls, PerceptionError, SegmentationParams, WallPair};
use crate::sim::LidarScan;
use crate::spline::PathSpline;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanningError {
    #[error(transparent)]
    Perception(#[from] PerceptionError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("no wall available to build a centerline from")]
    NoWalls,
    #[error("track width memory is not positive: {0}")]
    InvalidWidth(f64),
    #[error("invalid smoothing parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingParams {
    pub laplacian_iterations: usize,
    pub laplacian_lambda: f64,
    pub opheim_min_tol: f64,
    pub opheim_max_tol: f64,
    /// Odd window length, in samples, for the width median and mean.
    pub width_window: usize,
    pub pair_angle_range: f64,
    pub resolution: f64,
}

impl Default for SmoothingParams {
    fn default() -> Self {
        Self {
            laplacian_iterations: 3,
            laplacian_lambda: 0.5,
            opheim_min_tol: 0.03,
            opheim_max_tol: 1.0,
            width_window: 9,
            pair_angle_range: 15f64.to_radians(),
            resolution: 0.10,
        }
    }
}

impl SmoothingParams {
    pub fn validate(&self) -> Result<(), PlanningError> {
        let bad = |m: &str| Err(PlanningError::InvalidParams(m.to_string()));
        if !(self.laplacian_lambda >= 0.0 && self.laplacian_lambda < 1.0) {
            return bad("laplacian_lambda must lie in [0, 1)");
        }
        if !(self.opheim_min_tol > 0.0 && self.opheim_min_tol < self.opheim_max_tol) {
            return bad("need 0 < opheim_min_tol < opheim_max_tol");
        }
        if self.width_window == 0 || self.width_window.is_multiple_of(2) {
            return bad("width_window must be odd");
        }
        if !(self.pair_angle_range > 0.0 && self.pair_angle_range < std::f64::consts::FRAC_PI_2) {
            return bad("pair_angle_range must lie in (0, pi/2)");
        }
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return bad("resolution must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PlannerParams {
    pub segmentation: SegmentationParams,
    pub smoothing: SmoothingParams,
}

/// Intermediate geometry of one planning pass, kept for debugging dumps.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlanStages {
    pub points: Vec<Point2>,
    pub left: Vec<Point2>,
    pub right: Vec<Point2>,
    pub centerline: Vec<Point2>,
    pub smoothed: Vec<Point2>,
    pub simplified: Vec<Point2>,
}

impl PlanStages {
    /// Stage name and points, in pipeline order.
    pub fn iter(&self) -> impl Iterator<Item = (&'static str, &[Point2])> {
        [
            ("points", self.points.as_slice()),
            ("left", self.left.as_slice()),
            ("right", self.right.as_slice()),
            ("centerline", self.centerline.as_slice()),
            ("smoothed", self.smoothed.as_slice()),
            ("simplified", self.simplified.as_slice()),
        ]
        .into_iter()
    }
}

#[derive(Debug, Clone)]
pub struct Plan {
    pub spline: PathSpline,
    pub width: WidthProfile,
    pub stages: PlanStages,
}

/// Runs the full chain from a scan to a local spline in the sensor frame.
pub fn plan_pipeline(scan: &LidarScan, prev: &WidthProfile, params: &PlannerParams) -> Result<Plan, PlanningError> {
    let sp = &params.smoothing;
    let points = scan_to_points(scan)?;
    let segments = filter_segments(segment_scan(&points, &params.segmentation), &params.segmentation);
    let walls = select_walls(&segments)?;
    let width = estimate_track_width(&walls, prev, sp);
    let center = generate_centerline(&walls, &width, sp)?;
    let smoothed = laplacian_smooth(center.points.points(), sp)?;
    let mut simplified = opheim_simplify(&smoothed, sp);
    if simplified.len() < 3 {
        // A straight stretch shorter than the search radius collapses to its
        // endpoints; keep the middle point so a cubic can still be fitted.
        simplified.insert(1, smoothed[smoothed.len() / 2]);
    }
    let spline = PathSpline::fit(&simplified)?;
    let stages = PlanStages {
        points: points.into_points(),
        left: side_points(&walls, WallSide::Left),
        right: side_points(&walls, WallSide::Right),
        centerline: center.points.into_points(),
        smoothed,
        simplified,
    };
    Ok(Plan { spline, width, stages })
}

fn side_points(walls: &WallPair, side: WallSide) -> Vec<Point2> {
    let seg = match side {
        WallSide::Left => &walls.left,
        WallSide::Right => &walls.right,
    };
    seg.as_ref().map(|s| s.points.clone()).unwrap_or_default()
}

/// Endpoint gap below which a left and a right wall meeting at the forward
/// axis are treated as one wall.
pub(crate) const JOIN_GAP: f64 = 0.15;

/// Both sides concatenated in scan order when they are the two halves of a
/// single wall cut at the forward axis, as seen when facing the outer wall
/// of a bend.
pub(crate) fn joined_wall(walls: &WallPair) -> Option<Vec<Point2>> {
    let (l, r) = walls.both()?;
    let (lf, ll) = (l.points[0], l.points[l.len() - 1]);
    let (rf, rl) = (r.points[0], r.points[r.len() - 1]);
    let meets = |a: Point2, b: Point2| a.distance(b) <= JOIN_GAP && a.x > 0.0 && a.y.abs() <= JOIN_GAP && b.y.abs() <= JOIN_GAP;
    let chain = |first: &[Point2], second: &[Point2]| first.iter().chain(second).copied().collect::<Vec<_>>();
    if meets(rl, lf) {
        Some(chain(&r.points, &l.points))
    } else if meets(ll, rf) {
        Some(chain(&l.points, &r.points))
    } else {
        None
    }
}

/// Resamples a wall at `resolution`, ordered from the end nearer the
/// origin. Near-duplicate points are thinned first so scan noise does not
/// fold the resampled polyline back on itself.
pub(crate) fn prepare_wall(points: &[Point2], resolution: f64) -> Vec<Point2> {
    let mut thinned: Vec<Point2> = Vec::with_capacity(points.len());
    for &p in points {
        match thinned.last() {
            Some(last) if last.distance(p) < 0.5 * resolution => {}
            _ => thinned.push(p),
        }
    }
    if let Some(&tail) = points.last() {
        match thinned.len() {
            1 if thinned[0] != tail => thinned.push(tail),
            n if n > 1 => thinned[n - 1] = tail,
            _ => {}
        }
    }
    if thinned.len() >= 2 && thinned[0].norm() > thinned[thinned.len() - 1].norm() {
        thinned.reverse();
    }
    if thinned.len() < 2 {
        return thinned;
    }
    crate::geometry::resample(&thinned, resolution)
}

/// Unit normals from a central difference over `k` neighbours on each side,
/// all on the side of the polyline facing the origin at its nearest point.
pub(crate) fn inward_normals(points: &[Point2], k: usize, left_hint: bool) -> Vec<Point2> {
    let n = points.len();
    let mut normals: Vec<Point2> = (0..n)
        .map(|i| {
            let a = points[i.saturating_sub(k)];
            let b = points[(i + k).min(n - 1)];
            (b - a).normalized().perp()
        })
        .collect();
    let Some((near, _)) = points
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.norm_sq().total_cmp(&b.1.norm_sq()))
    else {
        return normals;
    };
    let toward = normals[near].dot(Point2::ORIGIN - points[near]);
    let flip = if toward.abs() > 1e-9 {
        toward < 0.0
    } else {
        // The origin lies on the tangent line: a left wall faces -y.
        (normals[near].y > 0.0) == left_hint
    };
    if flip {
        for v in &mut normals {
            *v = -*v;
        }
    }
    normals
}
