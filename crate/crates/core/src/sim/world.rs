use super::{
    build_walls, cast_lidar, check_collision, detect_lap, step_vehicle, ControlCommand, LidarScan,
    SensorConfig, SimError, Track, VehicleParams, VehicleState, Walls,
};
use crate::geometry::Pose2;

/// Control period (40 Hz).
pub const CONTROL_DT: f64 = 0.025;
/// Physics substeps per control period.
pub const SUBSTEPS: usize = 10;
/// Physics step (400 Hz).
pub const PHYSICS_DT: f64 = CONTROL_DT / SUBSTEPS as f64;

/// What happened during one control period.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepOutcome {
    /// Interpolated time of a start-line crossing, if any.
    pub lap_time_stamp: Option<f64>,
    pub collision: bool,
}

/// A single simulated car on a track.
#[derive(Debug, Clone)]
pub struct World {
    pub track: Track,
    pub walls: Walls,
    pub params: VehicleParams,
    pub sensor: SensorConfig,
    pub state: VehicleState,
    /// Distance driven by the rear axle.
    pub odometer: f64,
}

impl World {
    /// Places the car at rest on the start vertex, facing along the track.
    pub fn new(track: Track, params: VehicleParams, sensor: SensorConfig) -> Result<Self, SimError> {
        params.validate()?;
        sensor.validate()?;
        let walls = build_walls(&track)?;
        let start = track.centerline[track.start_index];
        let heading = track.tangent(track.start_index).angle();
        Ok(Self {
            track,
            walls,
            params,
            sensor,
            state: VehicleState::at_rest(Pose2::new(start.x, start.y, heading)),
            odometer: 0.0,
        })
    }

    pub fn sensor_pose(&self) -> Pose2 {
        self.state.pose.compose(&self.sensor.mount_offset)
    }

    pub fn sense(&self, rng_seed: u64) -> LidarScan {
        let mut scan = cast_lidar(&self.walls, &self.sensor_pose(), &self.sensor, rng_seed);
        scan.t = self.state.t;
        scan
    }

    /// Applies `cmd` for one control period.
    pub fn advance(&mut self, cmd: &ControlCommand) -> Result<StepOutcome, SimError> {
        let mut outcome = StepOutcome::default();
        for _ in 0..SUBSTEPS {
            let prev = self.state;
            self.state = step_vehicle(&prev, cmd, &self.params, PHYSICS_DT)?;
            self.odometer += prev.pose.position.distance(self.state.pose.position);
            if outcome.lap_time_stamp.is_none() {
                if let Some(ev) = detect_lap(&self.track, &prev.pose, &self.state.pose) {
                    outcome.lap_time_stamp = Some(ev.time(prev.t, self.state.t));
                }
            }
        }
        outcome.collision = check_collision(&self.walls, &self.state, &self.params);
        Ok(outcome)
    }
}
