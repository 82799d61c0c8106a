use serde::{Deserialize, Serialize};

use super::SimError;
use crate::geometry::{normalize_angle, Pose2};

/// Geometry and actuator model of a 1/10-scale car.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleParams {
    pub wheelbase: f64,
    /// Half of the vehicle width.
    pub track_halfwidth_footprint: f64,
    pub length_footprint: f64,
    pub delta_max: f64,
    /// Steering first-order lag time constant.
    pub tau_delta: f64,
    /// Speed first-order lag time constant.
    pub tau_v: f64,
    /// Drive/brake acceleration saturation.
    pub a_cmd_max: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self {
            wheelbase: 0.33,
            track_halfwidth_footprint: 0.15,
            length_footprint: 0.50,
            delta_max: 0.40,
            tau_delta: 0.10,
            tau_v: 0.30,
            a_cmd_max: 6.0,
        }
    }
}

impl VehicleParams {
    pub fn validate(&self) -> Result<(), SimError> {
        let all = [
            self.wheelbase,
            self.track_halfwidth_footprint,
            self.length_footprint,
            self.delta_max,
            self.tau_delta,
            self.tau_v,
            self.a_cmd_max,
        ];
        if all.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(SimError::InvalidParams("vehicle parameters must be positive".into()));
        }
        if self.delta_max >= std::f64::consts::FRAC_PI_2 {
            return Err(SimError::InvalidParams("delta_max must be below pi/2".into()));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        2.0 * self.track_halfwidth_footprint
    }
}

/// Vehicle state referenced to the rear axle.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct VehicleState {
    pub pose: Pose2,
    pub v: f64,
    pub yaw_rate: f64,
    pub delta_measured: f64,
    pub t: f64,
}

impl VehicleState {
    pub fn at_rest(pose: Pose2) -> Self {
        Self {
            pose,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlCommand {
    pub delta_target: f64,
    pub v_target: f64,
}

impl ControlCommand {
    pub const STOP: ControlCommand = ControlCommand {
        delta_target: 0.0,
        v_target: 0.0,
    };
}

/// Largest accepted physics substep.
pub const MAX_DT: f64 = 0.01;

/// Advances the kinematic bicycle by one RK4 step of length `dt`.
///
/// Steering and speed follow their targets through first-order lags; the
/// speed derivative saturates at `a_cmd_max`.
pub fn step_vehicle(
    state: &VehicleState,
    cmd: &ControlCommand,
    params: &VehicleParams,
    dt: f64,
) -> Result<VehicleState, SimError> {
    if !(dt > 0.0 && dt <= MAX_DT) {
        return Err(SimError::InvalidDt(dt));
    }
    let delta_target = cmd.delta_target.clamp(-params.delta_max, params.delta_max);
    let v_target = cmd.v_target.max(0.0);
    // [x, y, psi, v, delta]
    let deriv = |s: [f64; 5]| -> [f64; 5] {
        let [_, _, psi, v, delta] = s;
        let dv = ((v_target - v) / params.tau_v).clamp(-params.a_cmd_max, params.a_cmd_max);
        [
            v * psi.cos(),
            v * psi.sin(),
            v * delta.tan() / params.wheelbase,
            dv,
            (delta_target - delta) / params.tau_delta,
        ]
    };
    let axpy = |s: [f64; 5], k: [f64; 5], h: f64| -> [f64; 5] {
        let mut out = s;
        for i in 0..5 {
            out[i] += h * k[i];
        }
        out
    };
    let s0 = [
        state.pose.position.x,
        state.pose.position.y,
        state.pose.psi,
        state.v,
        state.delta_measured,
    ];
    let k1 = deriv(s0);
    let k2 = deriv(axpy(s0, k1, 0.5 * dt));
    let k3 = deriv(axpy(s0, k2, 0.5 * dt));
    let k4 = deriv(axpy(s0, k3, dt));
    let mut s = s0;
    for i in 0..5 {
        s[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    let v = s[3].max(0.0);
    let delta = s[4].clamp(-params.delta_max, params.delta_max);
    Ok(VehicleState {
        pose: Pose2::new(s[0], s[1], normalize_angle(s[2])),
        v,
        yaw_rate: v * delta.tan() / params.wheelbase,
        delta_measured: delta,
        t: state.t + dt,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn straight_motion() {
        let p = VehicleParams::default();
        let mut s = VehicleState {
            v: 2.0,
            ..VehicleState::default()
        };
        let cmd = ControlCommand {
            delta_target: 0.0,
            v_target: 2.0,
        };
        for _ in 0..10 {
            s = step_vehicle(&s, &cmd, &p, 0.01).unwrap();
        }
        assert!((s.pose.position.x - 0.2).abs() < 1e-12);
        assert_eq!(s.pose.position.y, 0.0);
        assert_eq!(s.pose.psi, 0.0);
        assert!((s.t - 0.1).abs() < 1e-12);
    }

    #[test]
    fn rejects_large_dt() {
        let p = VehicleParams::default();
        let s = VehicleState::default();
        assert!(matches!(
            step_vehicle(&s, &ControlCommand::STOP, &p, 0.1),
            Err(SimError::InvalidDt(_))
        ));
        assert!(step_vehicle(&s, &ControlCommand::STOP, &p, 0.0).is_err());
    }

    #[test]
    fn steady_turn_radius_matches_bicycle_geometry() {
        let p = VehicleParams::default();
        let delta0: f64 = 0.25;
        let mut s = VehicleState {
            v: 1.5,
            delta_measured: delta0,
            ..VehicleState::default()
        };
        let cmd = ControlCommand {
            delta_target: delta0,
            v_target: 1.5,
        };
        let expected = p.wheelbase / delta0.tan();
        // One full revolution; the circle center is at (0, R).
        let period = 2.0 * PI * expected / 1.5;
        let steps = (period / 0.0025).ceil() as usize;
        let center = crate::geometry::Point2::new(0.0, expected);
        let mut max_err: f64 = 0.0;
        for _ in 0..steps {
            s = step_vehicle(&s, &cmd, &p, 0.0025).unwrap();
            max_err = max_err.max((s.pose.position.distance(center) - expected).abs());
        }
        assert!(max_err / expected < 0.01, "radius error {max_err}");
        assert!(s.pose.position.norm() < 0.01 * expected);
    }

    #[test]
    fn at_rest_stays_put() {
        let p = VehicleParams::default();
        let mut s = VehicleState::at_rest(Pose2::new(1.0, 2.0, 0.3));
        let cmd = ControlCommand {
            delta_target: 0.4,
            v_target: 0.0,
        };
        for _ in 0..400 {
            s = step_vehicle(&s, &cmd, &p, 0.0025).unwrap();
        }
        assert_eq!(s.pose, Pose2::new(1.0, 2.0, 0.3));
        assert_eq!(s.v, 0.0);
        assert!(s.delta_measured <= p.delta_max);
    }

    #[test]
    fn steering_and_speed_saturate() {
        let p = VehicleParams::default();
        let mut s = VehicleState::default();
        let cmd = ControlCommand {
            delta_target: 3.0,
            v_target: 100.0,
        };
        let s1 = step_vehicle(&s, &cmd, &p, 0.01).unwrap();
        assert!((s1.v - p.a_cmd_max * 0.01).abs() < 1e-12);
        for _ in 0..1000 {
            s = step_vehicle(&s, &cmd, &p, 0.01).unwrap();
            assert!(s.delta_measured.abs() <= p.delta_max);
        }
    }
}
