//! Lateral and longitudinal control on the local spline.

mod controller;
mod stanley;
mod velocity;

pub use controller::{control_step, ControlContext, ControlStatus, ControllerMemory, PlanSnapshot, StanleyConfig, MAX_HELD_STEPS};
pub use stanley::{compute_lookahead, lateral_errors, stanley_steering, LateralErrors, StanleyGains, LOOKAHEAD_SAMPLE_STEP};
pub use velocity::{fit_velocity_profile, rate_limit, VelocityLimits, VelocityProfile};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ControlError {
    #[error("cross-track denominator v*k_damp + k_soft is not positive")]
    NonpositiveDenominator,
    #[error("velocity profile needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("invalid controller configuration: {0}")]
    InvalidConfig(String),
}
