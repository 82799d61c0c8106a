//! Procedural track layouts.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::geometry::{Point2, Polyline};
use crate::sim::{build_walls, Track, TrackWidth};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackKind {
    Corridor,
    Slalom,
    PaperLike,
    Random,
}

impl std::str::FromStr for TrackKind {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "corridor" => Ok(Self::Corridor),
            "slalom" => Ok(Self::Slalom),
            "paper_like" => Ok(Self::PaperLike),
            "random" => Ok(Self::Random),
            other => Err(HarnessError::InvalidParams(format!("unknown track kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrackParams {
    /// Track width; `None` uses seven vehicle widths.
    pub width: Option<f64>,
    pub vehicle_width: f64,
    /// Straight length for the corridor layout.
    pub straight_length: f64,
    /// Centerline vertex spacing.
    pub spacing: f64,
}

impl Default for TrackParams {
    fn default() -> Self {
        Self {
            width: None,
            vehicle_width: 0.30,
            straight_length: 10.0,
            spacing: 0.2,
        }
    }
}

impl TrackParams {
    pub fn track_width(&self) -> f64 {
        self.width.unwrap_or(7.0 * self.vehicle_width)
    }
}

pub fn generate_track(kind: TrackKind, seed: u64, params: &TrackParams) -> Result<Track, HarnessError> {
    let w = params.track_width();
    if !(w > 0.0 && params.spacing > 0.0 && params.straight_length > 0.0 && params.vehicle_width > 0.0) {
        return Err(HarnessError::InvalidParams("width, spacing and lengths must be positive".into()));
    }
    if params.spacing > 0.25 * w {
        return Err(HarnessError::InvalidParams("vertex spacing too coarse for the width".into()));
    }
    let (name, outline) = match kind {
        TrackKind::Corridor => ("corridor", stadium(params.straight_length, (1.5 * w).max(2.5), params.spacing)),
        TrackKind::Slalom => ("slalom", slalom(w, params.spacing)),
        TrackKind::PaperLike => ("paper_like", paper_like(params.spacing)?),
        TrackKind::Random => return random_track(seed, w, params.spacing),
    };
    finish(name, outline, w)
}

fn finish(name: &str, mut pts: Vec<Point2>, width: f64) -> Result<Track, HarnessError> {
    pts.dedup_by(|b, a| a.distance(*b) < 1e-6);
    if pts.len() > 2 && pts[0].distance(pts[pts.len() - 1]) < 1e-6 {
        pts.pop();
    }
    let line = Polyline::new(pts).map_err(|e| HarnessError::InvalidParams(e.to_string()))?;
    let track = Track::new(name, line, TrackWidth::Uniform(width), 0)?;
    build_walls(&track)?;
    Ok(track)
}

/// Samples the segment from `a` to `b` at roughly `spacing`, without `b`.
fn line(a: Point2, b: Point2, spacing: f64, out: &mut Vec<Point2>) {
    let n = (a.distance(b) / spacing).ceil().max(1.0) as usize;
    out.extend((0..n).map(|k| a.lerp(b, k as f64 / n as f64)));
}

/// Samples a circular arc from angle `a0` sweeping `sweep`, without the end.
fn arc(center: Point2, r: f64, a0: f64, sweep: f64, spacing: f64, out: &mut Vec<Point2>) {
    let n = (r * sweep.abs() / spacing).ceil().max(1.0) as usize;
    out.extend((0..n).map(|k| center + Point2::from_polar(r, a0 + sweep * k as f64 / n as f64)));
}

/// Counter-clockwise stadium starting in the middle of the lower straight.
fn stadium(length: f64, r: f64, spacing: f64) -> Vec<Point2> {
    let h = length / 2.0;
    let mut pts = Vec::new();
    line(Point2::new(0.0, 0.0), Point2::new(h, 0.0), spacing, &mut pts);
    arc(Point2::new(h, r), r, -PI / 2.0, PI, spacing, &mut pts);
    line(Point2::new(h, 2.0 * r), Point2::new(-h, 2.0 * r), spacing, &mut pts);
    arc(Point2::new(-h, r), r, PI / 2.0, PI, spacing, &mut pts);
    line(Point2::new(-h, 0.0), Point2::new(0.0, 0.0), spacing, &mut pts);
    pts
}

/// Stadium whose lower straight weaves left and right. The weave fades in
/// and out so it joins the turns without a kink.
fn slalom(width: f64, spacing: f64) -> Vec<Point2> {
    let amp = 0.4 * width;
    let wavelength = 8.0;
    let length = 3.0 * wavelength;
    let r = (1.5 * width).max(3.0);
    let n = (length / (0.25 * spacing)).ceil() as usize;
    let mut pts: Vec<Point2> = Vec::new();
    for k in 0..n {
        let x = length * k as f64 / n as f64;
        let fade = (PI * x / length).sin().powi(2);
        let p = Point2::new(x, amp * fade * (TAU * x / wavelength).sin());
        if pts.last().is_none_or(|q| q.distance(p) >= spacing) {
            pts.push(p);
        }
    }
    arc(Point2::new(length, r), r, -PI / 2.0, PI, spacing, &mut pts);
    line(Point2::new(length, 2.0 * r), Point2::new(0.0, 2.0 * r), spacing, &mut pts);
    arc(Point2::new(0.0, r), r, PI / 2.0, PI, spacing, &mut pts);
    pts
}

/// Closed polygon with filleted corners: a long start straight, two
/// right-angle corners, a V-shaped chicane cut into the far side and two
/// more corners back to the start.
fn paper_like(spacing: f64) -> Result<Vec<Point2>, HarnessError> {
    let corners = [
        (Point2::new(9.0, 0.0), 0.0),
        (Point2::new(18.0, 0.0), 2.5),
        (Point2::new(18.0, 9.0), 2.5),
        (Point2::new(11.0, 9.0), 2.5),
        (Point2::new(8.0, 5.0), 2.0),
        (Point2::new(5.0, 9.0), 2.5),
        (Point2::new(0.0, 9.0), 2.5),
        (Point2::new(0.0, 0.0), 2.5),
    ];
    filleted_polygon(&corners, spacing)
}

/// Walks a closed polygon, replacing each corner with a tangent arc of the
/// given radius. A zero radius marks a pass-through vertex.
fn filleted_polygon(corners: &[(Point2, f64)], spacing: f64) -> Result<Vec<Point2>, HarnessError> {
    let n = corners.len();
    let vertex = |i: usize| corners[i % n].0;
    // Signed turn and tangent length at every corner.
    let fillets: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let d_in = (vertex(i) - vertex(i + n - 1)).normalized();
            let d_out = (vertex(i + 1) - vertex(i)).normalized();
            let turn = d_in.cross(d_out).atan2(d_in.dot(d_out));
            (turn, corners[i].1 * (turn.abs() / 2.0).tan())
        })
        .collect();
    for i in 0..n {
        if fillets[i].1 + fillets[(i + 1) % n].1 > vertex(i).distance(vertex(i + 1)) {
            return Err(HarnessError::InvalidParams(format!("fillets on edge {i} overlap")));
        }
    }
    let mut pts = Vec::new();
    for i in 0..n {
        let (turn, t) = fillets[i];
        let p = vertex(i);
        let d_in = (p - vertex(i + n - 1)).normalized();
        let d_out = (vertex(i + 1) - p).normalized();
        if t > 0.0 {
            let entry = p - d_in * t;
            let r = corners[i].1;
            let center = entry + d_in.perp() * (r * turn.signum());
            arc(center, r, (entry - center).angle(), turn, spacing, &mut pts);
        }
        let exit = p + d_out * t;
        let next = vertex(i + 1);
        let next_entry = next - d_out * fillets[(i + 1) % n].1;
        line(exit, next_entry, spacing, &mut pts);
    }
    Ok(pts)
}

/// Star-shaped loop: radii drawn at evenly spaced angles and interpolated
/// with a periodic Catmull-Rom curve in polar form. Retries with fresh
/// draws until the walls are valid.
fn random_track(seed: u64, width: f64, spacing: f64) -> Result<Track, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 {
        let k = rng.random_range(6..=10);
        let radii: Vec<f64> = (0..k).map(|_| rng.random_range(7.0..13.0)).collect();
        let radius_at = |theta: f64| {
            let u = theta / TAU * k as f64;
            let i = u.floor() as i64;
            let t = u - i as f64;
            let r = |j: i64| radii[j.rem_euclid(k as i64) as usize];
            let (p0, p1, p2, p3) = (r(i - 1), r(i), r(i + 1), r(i + 2));
            0.5 * (2.0 * p1
                + (-p0 + p2) * t
                + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t * t
                + (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t * t * t)
        };
        let dense = 4000;
        let raw: Vec<Point2> = (0..dense)
            .map(|j| {
                let theta = TAU * j as f64 / dense as f64 - PI / 2.0;
                Point2::from_polar(radius_at(theta + PI / 2.0), theta)
            })
            .collect();
        let mut pts: Vec<Point2> = Vec::new();
        for p in raw {
            if pts.last().is_none_or(|q| q.distance(p) >= spacing) {
                pts.push(p);
            }
        }
        if let Ok(track) = finish("random", pts, width) {
            if min_turn_radius(&track) >= width {
                return Ok(track);
            }
        }
    }
    Err(HarnessError::InvalidParams("no valid random track in 64 draws".into()))
}

/// Smallest circumradius over consecutive vertex triples spaced ~1 m apart.
fn min_turn_radius(track: &Track) -> f64 {
    let pts = track.centerline.points();
    let n = pts.len();
    let step = ((1.0 / pts[0].distance(pts[1])).round() as usize).max(1);
    (0..n)
        .map(|i| {
            let (a, b, c) = (pts[i], pts[(i + step) % n], pts[(i + 2 * step) % n]);
            let cross = (b - a).cross(c - a).abs();
            if cross < 1e-12 {
                f64::INFINITY
            } else {
                a.distance(b) * b.distance(c) * c.distance(a) / (2.0 * cross)
            }
        })
        .fold(f64::INFINITY, f64::min)
}
