use super::{VehicleParams, VehicleState, Walls};
use crate::geometry::{point_in_polygon, segments_intersect, Point2};

/// Corners of the vehicle rectangle, counter-clockwise. The rectangle is
/// centered half a wheelbase ahead of the rear axle.
pub fn footprint(state: &VehicleState, params: &VehicleParams) -> [Point2; 4] {
    let pose = state.pose;
    let center = pose.transform_point(Point2::new(0.5 * params.wheelbase, 0.0));
    let fwd = pose.heading() * (0.5 * params.length_footprint);
    let left = pose.heading().perp() * params.track_halfwidth_footprint;
    [
        center - fwd - left,
        center + fwd - left,
        center + fwd + left,
        center - fwd + left,
    ]
}

/// True when the footprint touches or overlaps any wall segment.
pub fn check_collision(walls: &Walls, state: &VehicleState, params: &VehicleParams) -> bool {
    let corners = footprint(state, params);
    let center = (corners[0] + corners[2]) * 0.5;
    let radius = corners[0].distance(center);
    walls.segments().iter().any(|&(a, b)| {
        if crate::geometry::point_segment_distance(center, a, b) > radius + 1e-9 {
            return false;
        }
        if point_in_polygon(a, &corners) || point_in_polygon(b, &corners) {
            return true;
        }
        (0..4).any(|k| segments_intersect(corners[k], corners[(k + 1) % 4], a, b))
    })
}
