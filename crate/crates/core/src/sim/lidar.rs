use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::{SimError, Walls};
use crate::geometry::{normalize_angle, point_segment_distance, ray_segment_distance, Point2, Pose2};

/// Planar scanner configuration. Defaults describe a 270° scanner with
/// 0.25° resolution and 30 m range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorConfig {
    pub fov: f64,
    pub angular_increment: f64,
    pub max_range: f64,
    pub noise_sigma: f64,
    /// Sensor pose relative to the rear axle.
    pub mount_offset: Pose2,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self {
            fov: 270f64.to_radians(),
            angular_increment: 0.25f64.to_radians(),
            max_range: 30.0,
            noise_sigma: 0.01,
            mount_offset: Pose2::new(0.25, 0.0, 0.0),
        }
    }
}

impl SensorConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.fov > 0.0 && self.fov <= 2.0 * PI) || !(self.angular_increment > 0.0) {
            return Err(SimError::InvalidParams("sensor fov/increment must be positive".into()));
        }
        let steps = self.fov / self.angular_increment;
        if (steps - steps.round()).abs() > 1e-6 {
            return Err(SimError::InvalidParams(format!(
                "fov / angular_increment = {steps} is not an integer"
            )));
        }
        if !(self.max_range > 0.0) || !(self.noise_sigma >= 0.0) {
            return Err(SimError::InvalidParams("max_range must be > 0 and noise_sigma >= 0".into()));
        }
        Ok(())
    }

    pub fn beam_count(&self) -> usize {
        (self.fov / self.angular_increment).round() as usize + 1
    }

    /// First beam angle; beams are symmetric about the forward axis.
    pub fn angle_min(&self) -> f64 {
        -(((self.beam_count() - 1) / 2) as f64) * self.angular_increment
            - if (self.beam_count() - 1) % 2 == 1 { 0.5 * self.angular_increment } else { 0.0 }
    }
}

/// One revolution of range readings in the sensor frame (x forward, y left).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LidarScan {
    pub angle_min: f64,
    pub angular_increment: f64,
    pub ranges: Vec<f64>,
    pub max_range: f64,
    pub t: f64,
}

impl LidarScan {
    /// Range value reported for beams without a return.
    pub fn no_return(&self) -> f64 {
        self.max_range + 1.0
    }

    pub fn is_return(&self, i: usize) -> bool {
        let r = self.ranges[i];
        r > 0.0 && r <= self.max_range
    }

    pub fn angle(&self, i: usize) -> f64 {
        self.angle_min + i as f64 * self.angular_increment
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }
}

/// Ray casts every beam against both walls.
///
/// Beams without a hit inside `max_range` report `max_range + 1`. With
/// `noise_sigma > 0` each return gets Gaussian noise truncated at three
/// sigma, drawn from a ChaCha stream selected by `rng_seed` and the beam
/// index.
pub fn cast_lidar(walls: &Walls, sensor_pose: &Pose2, cfg: &SensorConfig, rng_seed: u64) -> LidarScan {
    let n = cfg.beam_count();
    let inc = cfg.angular_increment;
    let angle_min = cfg.angle_min();
    let origin = sensor_pose.position;
    let mut ranges = vec![f64::INFINITY; n];
    let dirs: Vec<Point2> = (0..n)
        .map(|i| Point2::from_polar(1.0, sensor_pose.psi + angle_min + i as f64 * inc))
        .collect();

    let mut hit = |i: usize, a: Point2, b: Point2| {
        if let Some(d) = ray_segment_distance(origin, dirs[i], a, b) {
            if d < ranges[i] {
                ranges[i] = d;
            }
        }
    };
    for &(a, b) in walls.segments() {
        let dist = point_segment_distance(origin, a, b);
        if dist > cfg.max_range {
            continue;
        }
        if dist < 1e-9 {
            for i in 0..n {
                hit(i, a, b);
            }
            continue;
        }
        // Angular window the segment subtends, relative to the first beam.
        let rel_a = normalize_angle((a - origin).angle() - sensor_pose.psi);
        let rel_b = normalize_angle((b - origin).angle() - sensor_pose.psi);
        let span = normalize_angle(rel_b - rel_a);
        let lo = if span >= 0.0 { rel_a } else { rel_b };
        let hi = lo + span.abs();
        for shift in [-2.0 * PI, 0.0, 2.0 * PI] {
            let first = ((lo + shift - angle_min) / inc).floor() - 1.0;
            let last = ((hi + shift - angle_min) / inc).ceil() + 1.0;
            if last < 0.0 || first > (n - 1) as f64 {
                continue;
            }
            let first = first.max(0.0) as usize;
            let last = (last as usize).min(n - 1);
            for i in first..=last {
                hit(i, a, b);
            }
        }
    }

    let normal = (cfg.noise_sigma > 0.0).then(|| Normal::new(0.0, cfg.noise_sigma).expect("sigma is finite"));
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    for (i, r) in ranges.iter_mut().enumerate() {
        if *r > cfg.max_range {
            *r = cfg.max_range + 1.0;
            continue;
        }
        if let Some(normal) = &normal {
            rng.set_stream(i as u64);
            rng.set_word_pos(0);
            let e = normal
                .sample(&mut rng)
                .clamp(-3.0 * cfg.noise_sigma, 3.0 * cfg.noise_sigma);
            *r = (*r + e).clamp(f64::MIN_POSITIVE, cfg.max_range);
        }
    }
    LidarScan {
        angle_min,
        angular_increment: inc,
        ranges,
        max_range: cfg.max_range,
        t: 0.0,
    }
}
