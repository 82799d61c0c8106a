use serde::{Deserialize, Serialize};

use super::{inward_normals, joined_wall, prepare_wall, SmoothingParams};
use crate::geometry::Point2;
use crate::perception::WallPair;

pub const MIN_RELIABLE_WIDTH: f64 = 0.3;
pub const MAX_RELIABLE_WIDTH: f64 = 5.0;
/// Largest relative deviation from the running median that is still trusted.
pub const MEDIAN_TOLERANCE: f64 = 0.5;
pub const DEFAULT_INITIAL_WIDTH: f64 = 2.0;
/// In-band samples needed inside a window before its median is trusted.
pub const MIN_MEDIAN_SUPPORT: usize = 3;
const NORMAL_STENCIL: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthSample {
    /// Arc length along the reference side.
    pub s: f64,
    /// Distance to the paired point, or 0 when no pair was found.
    pub width: f64,
    pub valid: bool,
    /// Whether any valid sample fell inside this sample's window.
    pub supported: bool,
    pub anchor: Point2,
    pub pair: Option<Point2>,
}

/// Point-by-point width estimate along one wall, plus the scalar memory
/// carried between frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WidthProfile {
    pub samples: Vec<WidthSample>,
    pub smoothed: Vec<f64>,
    pub last_valid: f64,
}

impl WidthProfile {
    pub fn new(initial_width: f64) -> Self {
        Self {
            samples: Vec::new(),
            smoothed: Vec::new(),
            last_valid: initial_width,
        }
    }

    pub fn valid_count(&self) -> usize {
        self.samples.iter().filter(|s| s.valid).count()
    }

    /// Smoothed width of the sample whose anchor or paired point lies
    /// closest to `p`, if one is within `radius` and the profile holds any
    /// valid measurement.
    pub fn width_near(&self, p: Point2, radius: f64) -> Option<f64> {
        let mut best: Option<(f64, f64)> = None;
        if !self.samples.iter().any(|s| s.supported) {
            return None;
        }
        for (smp, &w) in self.samples.iter().zip(&self.smoothed) {
            let mut d = smp.anchor.distance(p);
            if let Some(q) = smp.pair {
                d = d.min(q.distance(p));
            }
            if d <= radius && best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, w));
            }
        }
        best.map(|(_, w)| w)
    }
}

impl Default for WidthProfile {
    fn default() -> Self {
        Self::new(DEFAULT_INITIAL_WIDTH)
    }
}

/// Pairs points of the longer wall with the opposite wall along inward
/// normals, gates the distances and smooths them with a moving average.
pub fn estimate_track_width(walls: &WallPair, prev: &WidthProfile, params: &SmoothingParams) -> WidthProfile {
    let Some((left, right)) = walls.both() else {
        return WidthProfile::new(prev.last_valid);
    };
    if joined_wall(walls).is_some() {
        return WidthProfile::new(prev.last_valid);
    }
    let (reference, other, ref_is_left) = if left.arc_length >= right.arc_length {
        (left, right, true)
    } else {
        (right, left, false)
    };
    let res = params.resolution;
    let anchors = prepare_wall(&reference.points, res);
    let opposite = prepare_wall(&other.points, res);
    if anchors.len() < 2 || opposite.is_empty() {
        return WidthProfile::new(prev.last_valid);
    }
    let normals = inward_normals(&anchors, NORMAL_STENCIL, ref_is_left);
    let (sin_range, cos_range) = params.pair_angle_range.sin_cos();
    let opposite_tangents = tangents(&opposite, NORMAL_STENCIL);

    let mut samples: Vec<WidthSample> = Vec::with_capacity(anchors.len());
    let mut s = 0.0;
    for (i, (&p, &n)) in anchors.iter().zip(&normals).enumerate() {
        if i > 0 {
            s += p.distance(anchors[i - 1]);
        }
        // Only interior points of a wall running parallel within the search
        // range qualify: a pair on the end of the opposite wall usually stands
        // in for a hidden foot point further along. The paired point is the
        // foot on the opposite wall's local tangent line, which must fall
        // within one sample of the matched point.
        let mut best: Option<(f64, usize)> = None;
        for (j, &q) in opposite.iter().enumerate().take(opposite.len() - 1).skip(1) {
            let v = q - p;
            let d = v.norm();
            let t = opposite_tangents[j];
            if d == 0.0 || v.dot(n) < d * cos_range || t.dot(n).abs() >= sin_range || v.dot(t).abs() > res {
                continue;
            }
            if best.is_none_or(|(bd, _)| d < bd) {
                best = Some((d, j));
            }
        }
        let pair = best.map(|(_, j)| {
            let t = opposite_tangents[j];
            let q = opposite[j];
            q + t * (p - q).dot(t)
        });
        let width = pair.map_or(0.0, |q| q.distance(p));
        samples.push(WidthSample {
            s,
            width,
            valid: pair.is_some() && (MIN_RELIABLE_WIDTH..=MAX_RELIABLE_WIDTH).contains(&width),
            supported: false,
            anchor: p,
            pair,
        });
    }

    let half = params.width_window / 2;
    let len = samples.len();
    let window = |i: usize| i.saturating_sub(half)..(i + half + 1).min(len);

    // Running-median gate over the in-band samples.
    let gated: Vec<bool> = (0..samples.len())
        .map(|i| {
            if !samples[i].valid {
                return false;
            }
            let mut near: Vec<f64> = samples[window(i)].iter().filter(|x| x.valid).map(|x| x.width).collect();
            if near.len() < MIN_MEDIAN_SUPPORT {
                return false;
            }
            near.sort_by(f64::total_cmp);
            let median = near[near.len() / 2];
            (samples[i].width - median).abs() <= MEDIAN_TOLERANCE * median
        })
        .collect();
    for (smp, ok) in samples.iter_mut().zip(&gated) {
        smp.valid = *ok;
    }

    let mut smoothed: Vec<Option<f64>> = (0..len)
        .map(|i| {
            let (sum, count) = samples[window(i)]
                .iter()
                .filter(|x| x.valid)
                .fold((0.0, 0usize), |(a, c), x| (a + x.width, c + 1));
            (count > 0).then(|| sum / count as f64)
        })
        .collect();
    for (smp, w) in samples.iter_mut().zip(&smoothed) {
        smp.supported = w.is_some();
    }
    let last_valid = smoothed.iter().rev().find_map(|w| *w).unwrap_or(prev.last_valid);
    // Unsupported stretches take the nearest supported value.
    let mut carry = smoothed.iter().find_map(|w| *w).unwrap_or(prev.last_valid);
    for w in &mut smoothed {
        match w {
            Some(v) => carry = *v,
            None => *w = Some(carry),
        }
    }
    let smoothed: Vec<f64> = smoothed.into_iter().map(|w| w.unwrap_or(carry)).collect();
    WidthProfile {
        samples,
        smoothed,
        last_valid,
    }
}

fn tangents(points: &[Point2], k: usize) -> Vec<Point2> {
    let n = points.len();
    (0..n)
        .map(|i| (points[(i + k).min(n - 1)] - points[i.saturating_sub(k)]).normalized())
        .collect()
}
