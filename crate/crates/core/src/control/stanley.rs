use serde::{Deserialize, Serialize};

use super::ControlError;
use crate::geometry::{normalize_angle, Point2};
use crate::sim::VehicleState;
use crate::spline::{ControlPoint, PathSpline};

/// Spacing of the curvature samples used by the adaptive lookahead.
pub const LOOKAHEAD_SAMPLE_STEP: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StanleyGains {
    pub k_ang: f64,
    pub k_dist: f64,
    /// Additive softening term of the cross-track denominator, m/s.
    pub k_soft: f64,
    pub k_damp: f64,
    pub k_rate: f64,
    pub k_steer: f64,
    /// Largest lookahead distance in meters.
    pub l_max: f64,
    /// Mean curvature (1/m) at which the lookahead saturates.
    pub kappa_norm: f64,
}

impl Default for StanleyGains {
    fn default() -> Self {
        Self {
            k_ang: 0.6,
            k_dist: 0.5,
            k_soft: 5.0,
            k_damp: 1.0,
            k_rate: -0.013,
            k_steer: 0.0,
            l_max: 0.2,
            kappa_norm: 1.0,
        }
    }
}

impl StanleyGains {
    pub fn validate(&self) -> Result<(), ControlError> {
        let all = [self.k_ang, self.k_dist, self.k_soft, self.k_damp, self.k_rate, self.k_steer, self.l_max, self.kappa_norm];
        if all.iter().any(|g| !g.is_finite()) {
            return Err(ControlError::InvalidConfig("gains must be finite".into()));
        }
        if self.k_soft < 0.0 || self.k_damp < 0.0 || (self.k_soft == 0.0 && self.k_damp == 0.0) {
            return Err(ControlError::NonpositiveDenominator);
        }
        if self.l_max < 0.0 {
            return Err(ControlError::InvalidConfig("L_max must be non-negative".into()));
        }
        if self.kappa_norm <= 0.0 {
            return Err(ControlError::InvalidConfig("kappa_norm must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LateralErrors {
    pub delta_psi: f64,
    pub delta_d: f64,
    pub delta_r: f64,
    pub delta_delta: f64,
}

impl std::ops::Neg for LateralErrors {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            delta_psi: -self.delta_psi,
            delta_d: -self.delta_d,
            delta_r: -self.delta_r,
            delta_delta: -self.delta_delta,
        }
    }
}

/// Control point ahead of the foot point by a distance that grows with the
/// mean absolute curvature of the upcoming window.
pub fn compute_lookahead(spline: &PathSpline, s_foot: f64, gains: &StanleyGains) -> ControlPoint {
    let end = spline.total_length();
    let s_foot = s_foot.clamp(0.0, end);
    let window_end = (s_foot + gains.l_max).min(end);
    let mut sum = 0.0;
    let mut count = 0usize;
    let mut k = 0usize;
    loop {
        let s = s_foot + k as f64 * LOOKAHEAD_SAMPLE_STEP;
        if s > window_end + 1e-12 {
            break;
        }
        sum += spline.eval_clamped(s).kappa.abs();
        count += 1;
        k += 1;
    }
    let kappa_mean = sum / count as f64;
    let l = gains.l_max * (kappa_mean / gains.kappa_norm).min(1.0);
    spline.eval_clamped((s_foot + l).min(end))
}

/// Heading, cross-track, yaw-rate and steering-rate errors against the
/// control point. Positive heading and cross-track errors ask for a left
/// turn.
pub fn lateral_errors(state: &VehicleState, front_axle: Point2, cp: &ControlPoint, prev_delta_measured: f64, v: f64) -> LateralErrors {
    let (sin, cos) = cp.psi_cp.sin_cos();
    LateralErrors {
        delta_psi: normalize_angle(cp.psi_cp - state.pose.psi),
        delta_d: cos * (cp.position.y - front_axle.y) - sin * (cp.position.x - front_axle.x),
        delta_r: v * cp.kappa - state.yaw_rate,
        delta_delta: state.delta_measured - prev_delta_measured,
    }
}

/// Steering angle from the four error terms. The caller clamps the result
/// to the steering limit.
pub fn stanley_steering(e: &LateralErrors, v: f64, gains: &StanleyGains) -> Result<f64, ControlError> {
    let denom = v * gains.k_damp + gains.k_soft;
    if !(denom > 0.0) {
        return Err(ControlError::NonpositiveDenominator);
    }
    Ok(gains.k_ang * e.delta_psi
        + (gains.k_dist * e.delta_d / denom).atan()
        + gains.k_rate * e.delta_r
        + gains.k_steer * e.delta_delta)
}
