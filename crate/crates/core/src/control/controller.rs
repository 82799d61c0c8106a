use serde::{Deserialize, Serialize};

use super::{compute_lookahead, fit_velocity_profile, lateral_errors, rate_limit, stanley_steering, ControlError, StanleyGains, VelocityLimits};
use crate::geometry::Pose2;
use crate::planning::{plan_pipeline, PlannerParams, PlanningError, WidthProfile};
use crate::sim::{ControlCommand, LidarScan, VehicleParams, VehicleState};
use crate::spline::PathSpline;

/// Planner failures tolerated while steering on the last good spline.
pub const MAX_HELD_STEPS: usize = 5;

/// The tunable part of the controller: one value per config file key.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StanleyConfig {
    pub gains: StanleyGains,
    pub limits: VelocityLimits,
}

impl StanleyConfig {
    pub fn validate(&self) -> Result<(), ControlError> {
        self.gains.validate()?;
        self.limits.validate()
    }
}

/// Everything fixed for the duration of a session.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlContext {
    pub config: StanleyConfig,
    pub planner: PlannerParams,
    pub vehicle: VehicleParams,
    /// Sensor pose relative to the rear axle.
    pub mount: Pose2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ControlStatus {
    #[default]
    Nominal,
    /// The planner failed; steering on the previous spline.
    Holding,
    /// The planner failed too often; crawling straight at v_min.
    Degraded,
}

/// A spline together with the world pose of the frame it is expressed in.
#[derive(Debug, Clone)]
pub struct PlanSnapshot {
    pub spline: PathSpline,
    pub frame: Pose2,
}

#[derive(Debug, Clone, Default)]
pub struct ControllerMemory {
    pub width: WidthProfile,
    pub plan: Option<PlanSnapshot>,
    pub failures: usize,
    pub prev_delta_measured: Option<f64>,
    pub status: ControlStatus,
    pub last_error: Option<PlanningError>,
}

/// One sense-to-command transition. Planner errors never escape: the
/// previous spline is reused for a few steps, then the vehicle crawls.
pub fn control_step(state: &VehicleState, scan: &LidarScan, mut memory: ControllerMemory, ctx: &ControlContext) -> (ControlCommand, ControllerMemory) {
    let sensor_pose = state.pose.compose(&ctx.mount);
    match plan_pipeline(scan, &memory.width, &ctx.planner) {
        Ok(plan) => {
            memory.width = plan.width;
            memory.plan = Some(PlanSnapshot { spline: plan.spline, frame: sensor_pose });
            memory.failures = 0;
            memory.status = ControlStatus::Nominal;
            memory.last_error = None;
        }
        Err(err) => {
            memory.failures += 1;
            memory.last_error = Some(err);
            memory.status = if memory.failures <= MAX_HELD_STEPS && memory.plan.is_some() {
                ControlStatus::Holding
            } else {
                ControlStatus::Degraded
            };
        }
    }
    let prev_delta = memory.prev_delta_measured.replace(state.delta_measured).unwrap_or(state.delta_measured);
    let cmd = match (&memory.plan, memory.status) {
        (Some(plan), ControlStatus::Nominal | ControlStatus::Holding) => track_spline(state, plan, prev_delta, ctx),
        _ => None,
    };
    let cmd = cmd.unwrap_or_else(|| {
        memory.status = ControlStatus::Degraded;
        ControlCommand { delta_target: 0.0, v_target: ctx.config.limits.v_min }
    });
    (cmd, memory)
}

fn track_spline(state: &VehicleState, plan: &PlanSnapshot, prev_delta: f64, ctx: &ControlContext) -> Option<ControlCommand> {
    let StanleyConfig { gains, limits } = &ctx.config;
    let mut local = *state;
    local.pose = plan.frame.relative(&state.pose);
    let front = local.pose.position + local.pose.heading() * ctx.vehicle.wheelbase;
    let spline = &plan.spline;
    let s_foot = spline.project(front);
    let cp = compute_lookahead(spline, s_foot, gains);
    let v = state.v;
    let errors = lateral_errors(&local, front, &cp, prev_delta, v);
    let delta = stanley_steering(&errors, v, gains).ok()?;
    let delta = delta.clamp(-ctx.vehicle.delta_max, ctx.vehicle.delta_max);

    let knots = spline.knot_points();
    let profile = fit_velocity_profile(&knots, v, limits).ok()?;
    // Speed comes from the first knot ahead of the foot point.
    let idx = knots.iter().position(|k| k.s > s_foot).unwrap_or(knots.len() - 1);
    let v_target = rate_limit(v, profile.v[idx], limits).max(0.0);
    Some(ControlCommand { delta_target: delta, v_target })
}
