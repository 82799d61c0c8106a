//! Planar geometry primitives shared by the simulator, the planner and the
//! controller.

use std::f64::consts::PI;
use std::ops::{Add, Deref, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Minimum separation between consecutive polyline vertices.
pub const MIN_SEPARATION: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("too few points: got {got}, need at least {need}")]
    TooFewPoints { got: usize, need: usize },
    #[error("degenerate input: consecutive points {index} and {} coincide", index + 1)]
    DegenerateInput { index: usize },
    #[error("non-finite coordinate at point {index}")]
    NonFinite { index: usize },
    #[error("arc position {s} outside [0, {length}]")]
    OutOfRange { s: f64, length: f64 },
}

/// Wraps an angle into (-pi, pi].
pub fn normalize_angle(theta: f64) -> f64 {
    let mut a = theta.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn from_polar(range: f64, angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(range * c, range * s)
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_sq(self) -> f64 {
        self.dot(self)
    }

    pub fn distance(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Counter-clockwise rotation by `theta`.
    pub fn rotate(self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    /// Left-hand perpendicular.
    pub fn perp(self) -> Self {
        Self::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        if n > 0.0 {
            self * (1.0 / n)
        } else {
            self
        }
    }

    pub fn lerp(self, o: Point2, t: f64) -> Self {
        self + (o - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Position plus heading. The heading is kept in (-pi, pi].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose2 {
    pub position: Point2,
    pub psi: f64,
}

impl Pose2 {
    pub fn new(x: f64, y: f64, psi: f64) -> Self {
        Self {
            position: Point2::new(x, y),
            psi: normalize_angle(psi),
        }
    }

    pub fn heading(&self) -> Point2 {
        Point2::from_polar(1.0, self.psi)
    }

    /// Maps a point expressed in this pose's frame into the parent frame.
    pub fn transform_point(&self, local: Point2) -> Point2 {
        self.position + local.rotate(self.psi)
    }

    /// Maps a parent-frame point into this pose's frame.
    pub fn inverse_transform_point(&self, world: Point2) -> Point2 {
        (world - self.position).rotate(-self.psi)
    }

    /// `self ∘ other`: `other` is expressed relative to `self`.
    pub fn compose(&self, other: &Pose2) -> Pose2 {
        let p = self.transform_point(other.position);
        Pose2::new(p.x, p.y, self.psi + other.psi)
    }

    pub fn inverse(&self) -> Pose2 {
        let p = (-self.position).rotate(-self.psi);
        Pose2::new(p.x, p.y, -self.psi)
    }

    /// Pose of `other` expressed in this pose's frame.
    pub fn relative(&self, other: &Pose2) -> Pose2 {
        self.inverse().compose(other)
    }
}

/// An ordered point sequence with at least two vertices and no repeated
/// consecutive vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Polyline {
    points: Vec<Point2>,
}

impl Polyline {
    pub fn new(points: Vec<Point2>) -> Result<Self, GeometryError> {
        if points.len() < 2 {
            return Err(GeometryError::TooFewPoints {
                got: points.len(),
                need: 2,
            });
        }
        for (i, p) in points.iter().enumerate() {
            if !p.is_finite() {
                return Err(GeometryError::NonFinite { index: i });
            }
        }
        for (i, w) in points.windows(2).enumerate() {
            if w[0].distance(w[1]) <= MIN_SEPARATION {
                return Err(GeometryError::DegenerateInput { index: i });
            }
        }
        Ok(Self { points })
    }

    /// Builds a polyline after dropping consecutive near-duplicates.
    pub fn from_points_dedup(points: impl IntoIterator<Item = Point2>) -> Result<Self, GeometryError> {
        let mut out: Vec<Point2> = Vec::new();
        for p in points {
            if out.last().is_none_or(|q| q.distance(p) > MIN_SEPARATION) {
                out.push(p);
            }
        }
        Self::new(out)
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point2> {
        self.points
    }

    pub fn length(&self) -> f64 {
        path_length(&self.points)
    }

    /// Segments `(p[i], p[i+1])`; when `closed`, also the segment back to the
    /// first vertex.
    pub fn segments(&self, closed: bool) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.points.len();
        let count = if closed { n } else { n - 1 };
        (0..count).map(move |i| (self.points[i], self.points[(i + 1) % n]))
    }
}

impl Deref for Polyline {
    type Target = [Point2];
    fn deref(&self) -> &[Point2] {
        &self.points
    }
}

pub fn path_length(points: &[Point2]) -> f64 {
    points.windows(2).map(|w| w[0].distance(w[1])).sum()
}

/// Cumulative arc length at each vertex, starting at 0.
pub fn cumulative_lengths(points: &[Point2]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut out = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            acc += points[i - 1].distance(*p);
        }
        out.push(acc);
    }
    out
}

/// Samples a polyline at equal arc-length `spacing`, always keeping the
/// first and last vertex.
pub fn resample(points: &[Point2], spacing: f64) -> Vec<Point2> {
    if points.len() < 2 || spacing <= 0.0 {
        return points.to_vec();
    }
    let cum = cumulative_lengths(points);
    let total = *cum.last().unwrap();
    let n = (total / spacing).floor() as usize;
    let mut out = Vec::with_capacity(n + 2);
    let mut seg = 0;
    for k in 0..=n {
        let s = k as f64 * spacing;
        while seg + 2 < points.len() && cum[seg + 1] < s {
            seg += 1;
        }
        let len = cum[seg + 1] - cum[seg];
        let t = if len > 0.0 { ((s - cum[seg]) / len).clamp(0.0, 1.0) } else { 0.0 };
        out.push(points[seg].lerp(points[seg + 1], t));
    }
    let last = *points.last().unwrap();
    if out.last().is_none_or(|q| q.distance(last) > spacing * 1e-3) {
        out.push(last);
    } else if let Some(q) = out.last_mut() {
        *q = last;
    }
    out
}

/// Closest point on segment `[a, b]` to `p`, with its parameter in [0, 1].
pub fn closest_point_on_segment(p: Point2, a: Point2, b: Point2) -> (Point2, f64) {
    let ab = b - a;
    let len_sq = ab.norm_sq();
    if len_sq == 0.0 {
        return (a, 0.0);
    }
    let t = ((p - a).dot(ab) / len_sq).clamp(0.0, 1.0);
    (a + ab * t, t)
}

pub fn point_segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    closest_point_on_segment(p, a, b).0.distance(p)
}

/// Proper or touching intersection of two closed segments.
pub fn segments_intersect(a: Point2, b: Point2, c: Point2, d: Point2) -> bool {
    segment_intersection(a, b, c, d).is_some() || segment_distance(a, b, c, d) <= 1e-12
}

/// Parameters `(t, u)` of the crossing `a + t(b-a) = c + u(d-c)` for
/// non-parallel segments, both in [0, 1].
pub fn segment_intersection(a: Point2, b: Point2, c: Point2, d: Point2) -> Option<(f64, f64)> {
    let r = b - a;
    let s = d - c;
    let denom = r.cross(s);
    if denom == 0.0 {
        return None;
    }
    let qp = c - a;
    let t = qp.cross(s) / denom;
    let u = qp.cross(r) / denom;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then_some((t, u))
}

/// Minimum distance between two closed segments.
pub fn segment_distance(a: Point2, b: Point2, c: Point2, d: Point2) -> f64 {
    if segment_intersection(a, b, c, d).is_some() {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// Distance along a ray from `origin` in unit direction `dir` to segment
/// `[a, b]`, if they meet.
pub fn ray_segment_distance(origin: Point2, dir: Point2, a: Point2, b: Point2) -> Option<f64> {
    let s = b - a;
    let denom = dir.cross(s);
    let qp = a - origin;
    if denom.abs() < 1e-15 {
        // Collinear: nearest endpoint in front of the ray, if on it.
        if qp.cross(dir).abs() > 1e-12 {
            return None;
        }
        let ta = qp.dot(dir);
        let tb = (b - origin).dot(dir);
        return match (ta >= 0.0, tb >= 0.0) {
            (true, true) => Some(ta.min(tb)),
            (false, false) => None,
            _ => Some(0.0),
        };
    }
    let t = qp.cross(s) / denom;
    let u = qp.cross(dir) / denom;
    (t >= 0.0 && (0.0..=1.0).contains(&u)).then_some(t)
}

/// Even-odd point-in-polygon test.
pub fn point_in_polygon(p: Point2, poly: &[Point2]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}
