use serde::{Deserialize, Serialize};

use super::ControlError;
use crate::spline::ControlPoint;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityLimits {
    pub v_min: f64,
    pub v_max: f64,
    pub a_x_max: f64,
    /// Braking magnitude, positive.
    pub a_x_min: f64,
    pub a_y_max: f64,
    /// Largest speed decrease per control step, negative.
    pub da_min: f64,
    /// Largest speed increase per control step, positive.
    pub da_max: f64,
}

impl Default for VelocityLimits {
    fn default() -> Self {
        Self {
            v_min: 2.0,
            v_max: 4.0,
            a_x_max: 3.0,
            a_x_min: 4.0,
            a_y_max: 5.0,
            da_min: -1.5,
            da_max: 1.0,
        }
    }
}

impl VelocityLimits {
    pub fn validate(&self) -> Result<(), ControlError> {
        let bad = |m: &str| Err(ControlError::InvalidConfig(m.to_string()));
        if !(self.v_min > 0.0 && self.v_min <= self.v_max && self.v_max.is_finite()) {
            return bad("need 0 < v_min <= v_max");
        }
        if !(self.a_x_max > 0.0 && self.a_x_min > 0.0 && self.a_y_max > 0.0) {
            return bad("acceleration limits must be positive");
        }
        if !(self.da_min < 0.0 && self.da_max > 0.0) {
            return bad("need da_min < 0 < da_max");
        }
        Ok(())
    }

    /// Highest speed allowed by lateral acceleration on curvature `kappa`.
    pub fn curvature_cap(&self, kappa: f64) -> f64 {
        if kappa == 0.0 {
            f64::INFINITY
        } else {
            (self.a_y_max / kappa.abs()).sqrt()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VelocityProfile {
    pub v: Vec<f64>,
    pub forward: Vec<f64>,
    pub backward: Vec<f64>,
}

/// Minimum-time speed profile: a forward pass bounded by acceleration and a
/// backward pass bounded by braking, both capped by lateral acceleration.
pub fn fit_velocity_profile(points: &[ControlPoint], v_seed: f64, limits: &VelocityLimits) -> Result<VelocityProfile, ControlError> {
    let n = points.len();
    if n < 2 {
        return Err(ControlError::TooFewPoints(n));
    }
    let cap: Vec<f64> = points.iter().map(|p| limits.curvature_cap(p.kappa)).collect();
    let gap = |i: usize| points[i].position.distance(points[i - 1].position);
    let bound = |v: f64| limits.v_min.max(v);

    let mut forward = vec![0.0; n];
    // The curvature cap applies at the seed point as everywhere else.
    forward[0] = bound(v_seed.clamp(limits.v_min, limits.v_max).min(cap[0]));
    for i in 1..n {
        let v_g = (forward[i - 1].powi(2) + 2.0 * gap(i) * limits.a_x_max).sqrt();
        forward[i] = bound(limits.v_max.min(v_g).min(cap[i]));
    }

    let mut backward = vec![0.0; n];
    backward[n - 1] = limits.v_min;
    for i in (0..n - 1).rev() {
        let v_l = (backward[i + 1].powi(2) + 2.0 * gap(i + 1) * limits.a_x_min).sqrt();
        backward[i] = bound(limits.v_max.min(v_l).min(cap[i]));
    }

    let v = forward.iter().zip(&backward).map(|(f, b)| f.min(*b)).collect();
    Ok(VelocityProfile { v, forward, backward })
}

/// Limits the change of the commanded speed relative to the measured one.
pub fn rate_limit(v_meas: f64, v_i: f64, limits: &VelocityLimits) -> f64 {
    (v_meas + limits.da_min).max((v_meas + limits.da_max).min(v_i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point2;
    use proptest::prelude::*;

    fn points(xs: &[(f64, f64)]) -> Vec<ControlPoint> {
        let mut s = 0.0;
        let mut prev: Option<Point2> = None;
        xs.iter()
            .map(|&(x, kappa)| {
                let p = Point2::new(x, 0.0);
                s += prev.map_or(0.0, |q| q.distance(p));
                prev = Some(p);
                ControlPoint { position: p, psi_cp: 0.0, kappa, s }
            })
            .collect()
    }

    /// Repeated relaxation of every neighbour constraint until nothing
    /// moves; an independent route to the same profile.
    pub(crate) fn relaxation_oracle(pts: &[ControlPoint], v_seed: f64, lim: &VelocityLimits) -> Vec<f64> {
        let n = pts.len();
        let mut v: Vec<f64> = pts
            .iter()
            .map(|p| {
                let cap = if p.kappa == 0.0 { f64::INFINITY } else { (lim.a_y_max / p.kappa.abs()).sqrt() };
                cap.min(lim.v_max).max(lim.v_min)
            })
            .collect();
        v[0] = v[0].min(v_seed.clamp(lim.v_min, lim.v_max));
        v[n - 1] = lim.v_min;
        loop {
            let mut changed = 0.0f64;
            for i in 0..n {
                let mut hi = v[i];
                if i > 0 {
                    let s = pts[i].position.distance(pts[i - 1].position);
                    hi = hi.min((v[i - 1] * v[i - 1] + 2.0 * s * lim.a_x_max).sqrt());
                }
                if i + 1 < n {
                    let s = pts[i + 1].position.distance(pts[i].position);
                    hi = hi.min((v[i + 1] * v[i + 1] + 2.0 * s * lim.a_x_min).sqrt());
                }
                let next = hi.max(lim.v_min);
                changed = changed.max((next - v[i]).abs());
                v[i] = next;
            }
            if changed <= 1e-12 {
                return v;
            }
        }
    }

    #[test]
    fn forward_pass_hand_values() {
        let lim = VelocityLimits { a_x_max: 2.0, v_max: 10.0, v_min: 0.5, ..Default::default() };
        let prof = fit_velocity_profile(&points(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]), 2.0, &lim).unwrap();
        assert_eq!(prof.forward[0], 2.0);
        assert!((prof.forward[1] - 8f64.sqrt()).abs() < 1e-12);
        assert!((prof.forward[2] - 12f64.sqrt()).abs() < 1e-12);
        assert_eq!(prof.backward[2], 0.5);
        for i in 0..3 {
            assert_eq!(prof.v[i], prof.forward[i].min(prof.backward[i]));
        }
    }

    #[test]
    fn constant_arc_hits_curvature_cap() {
        let xs: Vec<(f64, f64)> = (0..60).map(|i| (i as f64 * 0.5, 1.0)).collect();
        let lim = VelocityLimits { a_y_max: 4.0, v_max: 10.0, v_min: 0.5, a_x_max: 3.0, a_x_min: 4.0, ..Default::default() };
        let prof = fit_velocity_profile(&points(&xs), 2.0, &lim).unwrap();
        for v in &prof.v[5..50] {
            assert!((v - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn straight_saturates_then_decays() {
        let xs: Vec<(f64, f64)> = (0..100).map(|i| (i as f64 * 0.5, 0.0)).collect();
        let lim = VelocityLimits { v_max: 4.0, ..Default::default() };
        let prof = fit_velocity_profile(&points(&xs), lim.v_min, &lim).unwrap();
        assert_eq!(prof.v[50], 4.0);
        assert_eq!(prof.v[99], lim.v_min);
        assert!(prof.v[98] < 4.0);
    }

    #[test]
    fn single_point_is_rejected() {
        assert_eq!(
            fit_velocity_profile(&points(&[(0.0, 0.0)]), 1.0, &VelocityLimits::default()),
            Err(ControlError::TooFewPoints(1))
        );
    }

    #[test]
    fn rate_limit_examples() {
        let lim = VelocityLimits { da_max: 0.3, da_min: -0.5, ..Default::default() };
        assert!((rate_limit(3.0, 5.0, &lim) - 3.3).abs() < 1e-12);
        assert_eq!(rate_limit(3.0, 2.9, &lim), 2.9);
        assert_eq!(rate_limit(3.0, 1.0, &lim), 2.5);
    }

    #[test]
    fn default_limits_are_valid() {
        VelocityLimits::default().validate().unwrap();
        assert!(VelocityLimits { da_min: 0.1, ..Default::default() }.validate().is_err());
        assert!(VelocityLimits { v_min: 5.0, ..Default::default() }.validate().is_err());
    }

    pub(crate) fn instance(max_points: usize) -> impl Strategy<Value = (Vec<ControlPoint>, f64, VelocityLimits)> {
        (
            prop::collection::vec((0.05f64..2.0, -2.0f64..2.0), 2..max_points),
            0.5f64..3.0,
            1.0f64..8.0,
            0.5f64..6.0,
            0.5f64..6.0,
            1.0f64..10.0,
            0.0f64..12.0,
        )
            .prop_map(|(steps, v_min, span, ax, bx, ay, seed)| {
                let mut pts = Vec::new();
                let mut x = 0.0;
                for (k, (dx, kappa)) in steps.into_iter().enumerate() {
                    if k > 0 {
                        x += dx;
                    }
                    pts.push(ControlPoint { position: Point2::new(x, 0.0), psi_cp: 0.0, kappa, s: x });
                }
                // Keep v_min within every curvature cap.
                let v_min = v_min.min((ay / 2.0).sqrt());
                let lim = VelocityLimits { v_min, v_max: v_min + span, a_x_max: ax, a_x_min: bx, a_y_max: ay, ..Default::default() };
                (pts, seed, lim)
            })
    }

    proptest! {
        #[test]
        fn profile_is_feasible((pts, seed, lim) in instance(200)) {
            let prof = fit_velocity_profile(&pts, seed, &lim).unwrap();
            for (i, &v) in prof.v.iter().enumerate() {
                prop_assert!(v >= lim.v_min && v <= lim.v_max);
                prop_assert!(v * v * pts[i].kappa.abs() <= lim.a_y_max + 1e-9);
                if i > 0 {
                    let s = pts[i].position.distance(pts[i - 1].position);
                    let acc = (v * v - prof.v[i - 1].powi(2)) / (2.0 * s);
                    prop_assert!(acc <= lim.a_x_max + 1e-9 && acc >= -(lim.a_x_min + 1e-9));
                }
            }
        }

        #[test]
        fn profile_matches_relaxation((pts, seed, lim) in instance(20)) {
            let prof = fit_velocity_profile(&pts, seed, &lim).unwrap();
            let oracle = relaxation_oracle(&pts, seed, &lim);
            for (a, b) in prof.v.iter().zip(&oracle) {
                prop_assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }

        #[test]
        fn rate_limit_stays_in_band(v_meas in 0.0f64..10.0, v_i in 0.0f64..12.0, up in 0.01f64..2.0, down in 0.01f64..2.0) {
            let lim = VelocityLimits { da_max: up, da_min: -down, ..Default::default() };
            let out = rate_limit(v_meas, v_i, &lim);
            prop_assert!(out - v_meas <= up + 1e-12 && out - v_meas >= -down - 1e-12);
        }
    }
}
