use super::SmoothingParams;
use crate::geometry::{GeometryError, Point2};

/// Umbrella smoothing: every interior point moves `lambda` of the way toward
/// the midpoint of its neighbours, `laplacian_iterations` times. Endpoints
/// never move.
pub fn laplacian_smooth(path: &[Point2], params: &SmoothingParams) -> Result<Vec<Point2>, GeometryError> {
    if path.len() < 3 {
        return Err(GeometryError::TooFewPoints {
            got: path.len(),
            need: 3,
        });
    }
    let lambda = params.laplacian_lambda;
    let mut cur = path.to_vec();
    let mut next = cur.clone();
    for _ in 0..params.laplacian_iterations {
        for i in 1..cur.len() - 1 {
            let mid = (cur[i - 1] + cur[i + 1]) * 0.5;
            next[i] = cur[i] + (mid - cur[i]) * lambda;
        }
        std::mem::swap(&mut cur, &mut next);
    }
    Ok(cur)
}

/// Opheim simplification with a perpendicular tolerance (`opheim_min_tol`)
/// and a search radius (`opheim_max_tol`).
///
/// From the current key, points within the perpendicular tolerance of the
/// key are skipped and the last of them fixes the direction of a ray from the
/// key. Points are then consumed while they stay within the perpendicular
/// tolerance of that ray and within the search radius of the key; the last
/// consumed point becomes the next key. The output is a subsequence of the
/// input that keeps both endpoints.
pub fn opheim_simplify(path: &[Point2], params: &SmoothingParams) -> Vec<Point2> {
    let n = path.len();
    if n <= 2 {
        return path.to_vec();
    }
    let min_tol = params.opheim_min_tol;
    let max_tol = params.opheim_max_tol;
    let mut out = vec![path[0]];
    let mut key = 0;
    while key < n - 1 {
        // Ray direction point: last point still inside the min tolerance
        // disc around the key, or simply the next point.
        let mut r = key + 1;
        while r + 1 < n && path[r + 1].distance(path[key]) <= min_tol {
            r += 1;
        }
        let origin = path[key];
        let dir = path[r] - origin;
        let mut j = r + 1;
        while j < n {
            let p = path[j];
            if p.distance(origin) > max_tol || ray_distance(p, origin, dir) > min_tol {
                break;
            }
            j += 1;
        }
        let next_key = (j - 1).max(key + 1);
        out.push(path[next_key]);
        key = next_key;
    }
    out
}

fn ray_distance(p: Point2, origin: Point2, dir: Point2) -> f64 {
    let len = dir.norm();
    let rel = p - origin;
    if len == 0.0 || rel.dot(dir) <= 0.0 {
        return rel.norm();
    }
    dir.cross(rel).abs() / len
}
