use serde::{Deserialize, Serialize};

use super::SimError;
use crate::geometry::{Point2, Polyline};

/// Track width as stored in a track file: one value for the whole loop or
/// one per centerline vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TrackWidth {
    Uniform(f64),
    PerVertex(Vec<f64>),
}

/// On-disk track document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrackFile {
    pub name: String,
    pub centerline: Vec<[f64; 2]>,
    pub width: TrackWidth,
    pub start_index: usize,
}

/// A closed racing loop. The last centerline vertex connects back to the
/// first one.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub name: String,
    pub centerline: Polyline,
    /// Width at each centerline vertex.
    pub width: Vec<f64>,
    pub start_index: usize,
}

impl Track {
    pub fn new(
        name: impl Into<String>,
        centerline: Polyline,
        width: TrackWidth,
        start_index: usize,
    ) -> Result<Self, SimError> {
        let n = centerline.len();
        if n < 3 {
            return Err(SimError::InvalidTrack(format!("centerline has {n} vertices, need 3")));
        }
        let width = match width {
            TrackWidth::Uniform(w) => vec![w; n],
            TrackWidth::PerVertex(w) if w.len() == n => w,
            TrackWidth::PerVertex(w) => {
                return Err(SimError::InvalidTrack(format!(
                    "{} width values for {n} centerline vertices",
                    w.len()
                )))
            }
        };
        if let Some(i) = width.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(SimError::InvalidTrack(format!("width at vertex {i} is not positive")));
        }
        if start_index >= n {
            return Err(SimError::InvalidTrack(format!(
                "start_index {start_index} out of range for {n} vertices"
            )));
        }
        let gap = centerline[n - 1].distance(centerline[0]);
        if gap >= 0.5 * width[n - 1].min(width[0]) {
            return Err(SimError::InvalidTrack(format!(
                "centerline is not closed: {gap:.3} m gap between last and first vertex"
            )));
        }
        Ok(Self {
            name: name.into(),
            centerline,
            width,
            start_index,
        })
    }

    pub fn from_file(file: TrackFile) -> Result<Self, SimError> {
        let pts = file.centerline.iter().map(|&[x, y]| Point2::new(x, y)).collect();
        let centerline = Polyline::new(pts)?;
        Self::new(file.name, centerline, file.width, file.start_index)
    }

    pub fn to_file(&self) -> TrackFile {
        let uniform = self.width.iter().all(|w| *w == self.width[0]);
        TrackFile {
            name: self.name.clone(),
            centerline: self.centerline.iter().map(|p| [p.x, p.y]).collect(),
            width: if uniform {
                TrackWidth::Uniform(self.width[0])
            } else {
                TrackWidth::PerVertex(self.width.clone())
            },
            start_index: self.start_index,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let file: TrackFile =
            serde_json::from_str(text).map_err(|e| SimError::InvalidTrack(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("track serializes")
    }

    pub fn len(&self) -> usize {
        self.centerline.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centerline.is_empty()
    }

    /// Unit tangent at vertex `i` from the central difference of its
    /// neighbours on the loop.
    pub fn tangent(&self, i: usize) -> Point2 {
        let n = self.len();
        let prev = self.centerline[(i + n - 1) % n];
        let next = self.centerline[(i + 1) % n];
        (next - prev).normalized()
    }

    /// Length of the closed centerline.
    pub fn length(&self) -> f64 {
        self.centerline.segments(true).map(|(a, b)| a.distance(b)).sum()
    }
}

/// Wall geometry with its segment list cached for ray casting and
/// collision queries.
#[derive(Debug, Clone, PartialEq)]
pub struct Walls {
    pub left: Polyline,
    pub right: Polyline,
    pub closed: bool,
    segments: Vec<(Point2, Point2)>,
}

impl Walls {
    pub fn new(left: Polyline, right: Polyline, closed: bool) -> Self {
        let segments = left.segments(closed).chain(right.segments(closed)).collect();
        Self {
            left,
            right,
            closed,
            segments,
        }
    }

    /// All wall segments, left wall first.
    pub fn segments(&self) -> &[(Point2, Point2)] {
        &self.segments
    }
}

/// Offsets the centerline by half the local width along the vertex normals.
pub fn build_walls(track: &Track) -> Result<Walls, SimError> {
    let n = track.len();
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for i in 0..n {
        let normal = track.tangent(i).perp();
        let half = 0.5 * track.width[i];
        left.push(track.centerline[i] + normal * half);
        right.push(track.centerline[i] - normal * half);
    }
    // An offset segment running against its centerline segment means the
    // offset folded over itself.
    for i in 0..n {
        let j = (i + 1) % n;
        let dir = track.centerline[j] - track.centerline[i];
        for wall in [&left, &right] {
            if (wall[j] - wall[i]).dot(dir) <= 0.0 {
                return Err(SimError::SelfIntersectingWalls { segment: i });
            }
        }
    }
    check_crossings(&left, &right)?;
    let left = Polyline::new(left)?;
    let right = Polyline::new(right)?;
    Ok(Walls::new(left, right, true))
}

fn check_crossings(left: &[Point2], right: &[Point2]) -> Result<(), SimError> {
    let n = left.len();
    let seg = |w: &[Point2], i: usize| (w[i], w[(i + 1) % n]);
    let bbox = |(a, b): (Point2, Point2)| (a.x.min(b.x), a.x.max(b.x), a.y.min(b.y), a.y.max(b.y));
    let overlap = |p: (f64, f64, f64, f64), q: (f64, f64, f64, f64)| {
        p.0 <= q.1 && q.0 <= p.1 && p.2 <= q.3 && q.2 <= p.3
    };
    let adjacent = |i: usize, j: usize| i == j || (i + 1) % n == j || (j + 1) % n == i;
    let lb: Vec<_> = (0..n).map(|i| bbox(seg(left, i))).collect();
    let rb: Vec<_> = (0..n).map(|i| bbox(seg(right, i))).collect();
    for i in 0..n {
        for j in 0..n {
            if j > i && !adjacent(i, j) {
                for (w, b) in [(left, &lb), (right, &rb)] {
                    if overlap(b[i], b[j]) {
                        let (a0, a1) = seg(w, i);
                        let (b0, b1) = seg(w, j);
                        if crate::geometry::segments_intersect(a0, a1, b0, b1) {
                            return Err(SimError::SelfIntersectingWalls { segment: i });
                        }
                    }
                }
            }
            if overlap(lb[i], rb[j]) {
                let (a0, a1) = seg(left, i);
                let (b0, b1) = seg(right, j);
                if crate::geometry::segments_intersect(a0, a1, b0, b1) {
                    return Err(SimError::SelfIntersectingWalls { segment: i });
                }
            }
        }
    }
    Ok(())
}
