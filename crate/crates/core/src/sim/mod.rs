//! Deterministic 2D racing world: closed tracks bounded by walls, a
//! kinematic bicycle with actuator lag, a ray-cast planar LiDAR, footprint
//! collision checks and start/finish line timing.

mod collision;
mod lap;
mod lidar;
mod track;
mod vehicle;
mod world;

pub use collision::{check_collision, footprint};
pub use lap::{detect_lap, LapCrossing, StartLine};
pub use lidar::{cast_lidar, LidarScan, SensorConfig};
pub use track::{build_walls, Track, TrackFile, TrackWidth, Walls};
pub use vehicle::{step_vehicle, ControlCommand, VehicleParams, VehicleState};
pub use world::{StepOutcome, World, CONTROL_DT, PHYSICS_DT, SUBSTEPS};

use thiserror::Error;

use crate::geometry::GeometryError;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("physics step {0} s outside (0, 0.01]")]
    InvalidDt(f64),
    #[error("track walls self-intersect near segment {segment}")]
    SelfIntersectingWalls { segment: usize },
    #[error("invalid track: {0}")]
    InvalidTrack(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
