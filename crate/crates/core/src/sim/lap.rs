use super::Track;
use crate::geometry::{Point2, Pose2};

/// The start/finish cross-section of a track.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StartLine {
    pub center: Point2,
    /// Unit direction of increasing arc length.
    pub forward: Point2,
    pub half_width: f64,
}

impl StartLine {
    pub fn of(track: &Track) -> Self {
        let i = track.start_index;
        Self {
            center: track.centerline[i],
            forward: track.tangent(i),
            half_width: 0.5 * track.width[i],
        }
    }

    /// Signed distance of `p` ahead of the line.
    pub fn signed_distance(&self, p: Point2) -> f64 {
        (p - self.center).dot(self.forward)
    }
}

/// A forward crossing of the start/finish line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LapCrossing {
    /// Position of the crossing along the step, in [0, 1].
    pub fraction: f64,
}

impl LapCrossing {
    pub fn time(&self, t_prev: f64, t_curr: f64) -> f64 {
        t_prev + self.fraction * (t_curr - t_prev)
    }
}

/// Detects a forward crossing of the start line between two consecutive
/// poses. A pose exactly on the line counts as already crossed, so the
/// starting pose does not produce an event.
pub fn detect_lap(track: &Track, prev: &Pose2, curr: &Pose2) -> Option<LapCrossing> {
    let line = StartLine::of(track);
    let d0 = line.signed_distance(prev.position);
    let d1 = line.signed_distance(curr.position);
    if !(d0 < 0.0 && d1 >= 0.0) {
        return None;
    }
    let fraction = -d0 / (d1 - d0);
    let hit = prev.position.lerp(curr.position, fraction);
    let lateral = (hit - line.center).dot(line.forward.perp());
    (lateral.abs() <= line.half_width).then_some(LapCrossing { fraction })
}
