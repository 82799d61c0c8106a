//! Interpolating C² cubic spline over a planar polyline, queried by true arc
//! length.
//!
//! The spline is fitted with not-a-knot end conditions in the cumulative
//! chord length parameter. Arc length along each segment is integrated with a
//! 32-point Gauss–Legendre rule and inverted with a safeguarded Newton
//! iteration, so every query position `s` is a real distance along the curve.

use std::sync::OnceLock;

use crate::geometry::{normalize_angle, GeometryError, Point2, MIN_SEPARATION};

const GAUSS_ORDER: usize = 32;

/// Coarse sampling step of [`PathSpline::project`].
pub const PROJECTION_STEP: f64 = 0.05;
const PROJECTION_TOL: f64 = 1e-5;

/// A point on the reference path together with its tangent heading and
/// signed curvature (positive turns left).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlPoint {
    pub position: Point2,
    pub psi_cp: f64,
    pub kappa: f64,
    pub s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Cubic {
    c: [f64; 4],
}

impl Cubic {
    fn value(&self, u: f64) -> f64 {
        let [a, b, c, d] = self.c;
        a + u * (b + u * (c + u * d))
    }
    fn d1(&self, u: f64) -> f64 {
        let [_, b, c, d] = self.c;
        b + u * (2.0 * c + 3.0 * d * u)
    }
    fn d2(&self, u: f64) -> f64 {
        let [_, _, c, d] = self.c;
        2.0 * c + 6.0 * d * u
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Segment {
    x: Cubic,
    y: Cubic,
    /// Parameter span of the segment in chord length.
    h: f64,
}

impl Segment {
    fn speed(&self, u: f64) -> f64 {
        self.x.d1(u).hypot(self.y.d1(u))
    }

    fn arc_to(&self, u: f64) -> f64 {
        let (nodes, weights) = gauss_legendre();
        let half = 0.5 * u;
        nodes
            .iter()
            .zip(weights)
            .map(|(xi, w)| w * self.speed(half * (xi + 1.0)))
            .sum::<f64>()
            * half
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathSpline {
    segments: Vec<Segment>,
    knots_s: Vec<f64>,
    total_length: f64,
}

impl PathSpline {
    /// Fits a cubic C² spline through `points` (at least three, consecutive
    /// points distinct).
    pub fn fit(points: &[Point2]) -> Result<Self, GeometryError> {
        if points.len() < 3 {
            return Err(GeometryError::TooFewPoints {
                got: points.len(),
                need: 3,
            });
        }
        for (i, p) in points.iter().enumerate() {
            if !p.is_finite() {
                return Err(GeometryError::NonFinite { index: i });
            }
        }
        let mut h = Vec::with_capacity(points.len() - 1);
        for (i, w) in points.windows(2).enumerate() {
            let d = w[0].distance(w[1]);
            if d <= MIN_SEPARATION {
                return Err(GeometryError::DegenerateInput { index: i });
            }
            h.push(d);
        }
        let xs: Vec<f64> = points.iter().map(|p| p.x).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.y).collect();
        let cx = not_a_knot_cubic(&xs, &h);
        let cy = not_a_knot_cubic(&ys, &h);
        let segments: Vec<Segment> = cx
            .into_iter()
            .zip(cy)
            .zip(&h)
            .map(|((x, y), &h)| Segment { x, y, h })
            .collect();
        let mut knots_s = Vec::with_capacity(points.len());
        let mut acc = 0.0;
        knots_s.push(0.0);
        for seg in &segments {
            acc += seg.arc_to(seg.h);
            knots_s.push(acc);
        }
        Ok(Self {
            segments,
            knots_s,
            total_length: acc,
        })
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    /// Arc positions of the knots, strictly increasing from 0.
    pub fn knots(&self) -> &[f64] {
        &self.knots_s
    }

    pub fn knot_count(&self) -> usize {
        self.knots_s.len()
    }

    /// Evaluates position, tangent heading and curvature at arc position `s`.
    pub fn eval(&self, s: f64) -> Result<ControlPoint, GeometryError> {
        if !(0.0..=self.total_length).contains(&s) {
            return Err(GeometryError::OutOfRange {
                s,
                length: self.total_length,
            });
        }
        let (i, u) = self.locate(s);
        Ok(self.eval_param(i, u, s))
    }

    /// Like [`eval`](Self::eval) with `s` clamped into the domain.
    pub fn eval_clamped(&self, s: f64) -> ControlPoint {
        let s = s.clamp(0.0, self.total_length);
        let (i, u) = self.locate(s);
        self.eval_param(i, u, s)
    }

    /// Control points at every knot.
    pub fn knot_points(&self) -> Vec<ControlPoint> {
        let mut out: Vec<ControlPoint> = self
            .segments
            .iter()
            .enumerate()
            .map(|(i, _)| self.eval_param(i, 0.0, self.knots_s[i]))
            .collect();
        let last = self.segments.len() - 1;
        out.push(self.eval_param(last, self.segments[last].h, self.total_length));
        out
    }

    /// Points every `step` meters plus the end point.
    pub fn sample(&self, step: f64) -> Vec<ControlPoint> {
        let n = (self.total_length / step).floor() as usize;
        let mut out: Vec<ControlPoint> = (0..=n).map(|k| self.eval_clamped(k as f64 * step)).collect();
        if self.total_length - n as f64 * step > 1e-9 {
            out.push(self.eval_clamped(self.total_length));
        }
        out
    }

    /// Arc position of the point on the spline closest to `p`.
    ///
    /// Coarse search at [`PROJECTION_STEP`] spacing, then golden-section
    /// refinement around the best sample. Ties prefer the smaller `s`.
    pub fn project(&self, p: Point2) -> f64 {
        let n = (self.total_length / PROJECTION_STEP).ceil().max(1.0) as usize;
        let step = self.total_length / n as f64;
        let dist = |s: f64| self.position_at(s).distance(p);
        let mut best = (0.0, dist(0.0));
        for k in 1..=n {
            let s = if k == n { self.total_length } else { k as f64 * step };
            let d = dist(s);
            if d < best.1 {
                best = (s, d);
            }
        }
        let (mut lo, mut hi) = ((best.0 - step).max(0.0), (best.0 + step).min(self.total_length));
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let mut a = hi - g * (hi - lo);
        let mut b = lo + g * (hi - lo);
        let (mut fa, mut fb) = (dist(a), dist(b));
        while hi - lo > PROJECTION_TOL {
            if fa <= fb {
                hi = b;
                b = a;
                fb = fa;
                a = hi - g * (hi - lo);
                fa = dist(a);
            } else {
                lo = a;
                a = b;
                fa = fb;
                b = lo + g * (hi - lo);
                fb = dist(b);
            }
        }
        let refined = 0.5 * (lo + hi);
        if dist(refined) < best.1 {
            refined
        } else {
            best.0
        }
    }

    fn position_at(&self, s: f64) -> Point2 {
        let (i, u) = self.locate(s);
        let seg = &self.segments[i];
        Point2::new(seg.x.value(u), seg.y.value(u))
    }

    fn eval_param(&self, i: usize, u: f64, s: f64) -> ControlPoint {
        let seg = &self.segments[i];
        let (dx, dy) = (seg.x.d1(u), seg.y.d1(u));
        let (ddx, ddy) = (seg.x.d2(u), seg.y.d2(u));
        let speed_sq = dx * dx + dy * dy;
        let kappa = if speed_sq > 0.0 {
            (dx * ddy - dy * ddx) / speed_sq.powf(1.5)
        } else {
            0.0
        };
        ControlPoint {
            position: Point2::new(seg.x.value(u), seg.y.value(u)),
            psi_cp: normalize_angle(dy.atan2(dx)),
            kappa,
            s,
        }
    }

    /// Segment index and local chord parameter for arc position `s`.
    fn locate(&self, s: f64) -> (usize, f64) {
        let last = self.segments.len() - 1;
        let i = match self.knots_s.binary_search_by(|k| k.total_cmp(&s)) {
            Ok(i) => i.min(last),
            Err(i) => i.saturating_sub(1).min(last),
        };
        let seg = &self.segments[i];
        let target = s - self.knots_s[i];
        if target <= 0.0 {
            return (i, 0.0);
        }
        let seg_len = self.knots_s[i + 1] - self.knots_s[i];
        if target >= seg_len {
            return (i, seg.h);
        }
        let (mut lo, mut hi) = (0.0, seg.h);
        let mut u = seg.h * target / seg_len;
        for _ in 0..50 {
            let f = seg.arc_to(u) - target;
            if f.abs() < 1e-13 {
                break;
            }
            if f > 0.0 {
                hi = u;
            } else {
                lo = u;
            }
            let v = seg.speed(u);
            let next = if v > 1e-12 { u - f / v } else { f64::NAN };
            u = if next.is_finite() && next > lo && next < hi {
                next
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo < 1e-15 {
                break;
            }
        }
        (i, u)
    }
}

/// Per-interval cubic coefficients of the not-a-knot interpolating spline.
///
/// The third derivative is continuous across the second and the
/// second-to-last knot, so the end intervals extend their neighbours instead
/// of being forced straight. Three points yield a single parabola.
fn not_a_knot_cubic(values: &[f64], h: &[f64]) -> Vec<Cubic> {
    let n = values.len();
    let k = n - 2;
    let slope = |i: usize| (values[i + 1] - values[i]) / h[i];
    // Second derivatives at the knots.
    let mut m = vec![0.0; n];
    if k == 1 {
        let r = 6.0 * (slope(1) - slope(0));
        m.fill(r / (3.0 * (h[0] + h[1])));
    } else {
        let mut lower = vec![0.0; k];
        let mut diag = vec![0.0; k];
        let mut upper = vec![0.0; k];
        let mut rhs = vec![0.0; k];
        for j in 0..k {
            let i = j + 1;
            lower[j] = h[i - 1];
            diag[j] = 2.0 * (h[i - 1] + h[i]);
            upper[j] = h[i];
            rhs[j] = 6.0 * (slope(i) - slope(i - 1));
        }
        // Eliminate m[0] and m[n-1] through the not-a-knot conditions.
        let (h0, h1) = (h[0], h[1]);
        diag[0] += h0 + h0 * h0 / h1;
        upper[0] -= h0 * h0 / h1;
        let (ha, hb) = (h[n - 3], h[n - 2]);
        diag[k - 1] += hb + hb * hb / ha;
        lower[k - 1] -= hb * hb / ha;
        for j in 1..k {
            let w = lower[j] / diag[j - 1];
            diag[j] -= w * upper[j - 1];
            rhs[j] -= w * rhs[j - 1];
        }
        m[k] = rhs[k - 1] / diag[k - 1];
        for j in (0..k - 1).rev() {
            m[j + 1] = (rhs[j] - upper[j] * m[j + 2]) / diag[j];
        }
        m[0] = m[1] - h0 * (m[2] - m[1]) / h1;
        m[n - 1] = m[n - 2] + hb * (m[n - 2] - m[n - 3]) / ha;
    }
    (0..n - 1)
        .map(|i| {
            let hi = h[i];
            Cubic {
                c: [
                    values[i],
                    slope(i) - hi * (2.0 * m[i] + m[i + 1]) / 6.0,
                    m[i] / 2.0,
                    (m[i + 1] - m[i]) / (6.0 * hi),
                ],
            }
        })
        .collect()
}

/// Nodes and weights of the Gauss–Legendre rule on [-1, 1].
fn gauss_legendre() -> &'static ([f64; GAUSS_ORDER], [f64; GAUSS_ORDER]) {
    static RULE: OnceLock<([f64; GAUSS_ORDER], [f64; GAUSS_ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GAUSS_ORDER;
        let mut nodes = [0.0; GAUSS_ORDER];
        let mut weights = [0.0; GAUSS_ORDER];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        (nodes, weights)
    })
}
