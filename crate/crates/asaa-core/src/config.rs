//! Aggregated runtime configuration. Every tunable of the planning stack
//! lives behind one [`EpisodeConfig`] so scenario files and command-line
//! overrides can address any constant by path.

use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::flight::{CheckConfig, SampleConfig};
use crate::head::{HeadState, PlannerWeights};
use crate::sud::SudConfig;
use crate::timesync::SyncConfig;
use crate::tracker::{CameraIntrinsics, TrackerConfig};
use crate::world::GridConfig;

/// Camera head planning weights plus the mount's mechanical envelope.
#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct HeadConfig {
    pub weights: PlannerWeights,
    pub min_angle: f64,
    pub max_angle: f64,
    /// Mount slew cap, rad/s.
    pub max_rate: f64,
}

impl Default for HeadConfig {
    fn default() -> Self {
        HeadConfig {
            weights: PlannerWeights::default(),
            min_angle: -1.25 * PI,
            max_angle: 1.25 * PI,
            max_rate: 1.2,
        }
    }
}

impl HeadConfig {
    pub fn initial_state(&self, angle: f64) -> HeadState {
        HeadState {
            angle,
            prev_plan: angle,
            min_angle: self.min_angle,
            max_angle: self.max_angle,
            max_rate: self.max_rate,
        }
    }
}

/// Loop rates, follower gains, and collision bookkeeping constants.
#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SimConfig {
    /// Planning rate, Hz. Must divide `physics_rate`.
    pub control_rate: f64,
    pub physics_rate: f64,
    /// Fuselage slew cap, rad/s. Slower than the mount on purpose.
    pub yaw_rate_max: f64,
    /// Position gain of the setpoint follower.
    pub kp: f64,
    /// Velocity gain of the setpoint follower.
    pub kv: f64,
    /// One contact per obstacle per this many seconds.
    pub collision_refractory: f64,
    /// Collisions with the robot above this speed count as moving.
    pub moving_speed_threshold: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            control_rate: 20.0,
            physics_rate: 100.0,
            yaw_rate_max: 0.8,
            kp: 6.0,
            kv: 4.0,
            collision_refractory: 1.0,
            moving_speed_threshold: 0.05,
        }
    }
}

impl SimConfig {
    pub fn control_dt(&self) -> f64 {
        1.0 / self.control_rate
    }

    pub fn physics_dt(&self) -> f64 {
        1.0 / self.physics_rate
    }

    /// Physics sub-steps per control tick.
    pub fn substeps(&self) -> usize {
        let r = self.physics_rate / self.control_rate;
        debug_assert!((r - r.round()).abs() < 1e-9, "physics rate must be a multiple of control rate");
        r.round() as usize
    }
}

/// Stereo camera model: angular wedge, range, frame cadence, pipeline
/// delay, and the blur-dependent depth noise law.
#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SensorConfig {
    /// Horizontal field of view, rad.
    pub fov_width: f64,
    /// Sensing range, m.
    pub range: f64,
    pub frame_rate: f64,
    pub intrinsics: CameraIntrinsics,
    pub image_width: u32,
    pub image_height: u32,
    /// Column lattice pitch of the depth rays, px.
    pub col_stride: u32,
    /// Row lattice pitch of the depth rays, px.
    pub row_stride: u32,
    /// Depth noise floor, m (one sigma).
    pub depth_noise_0: f64,
    /// Depth noise slope, m per m/s of apparent image speed.
    pub depth_noise_k: f64,
    /// Hits nearer than this are dropped as self-returns.
    pub min_depth: f64,
    /// Frames arrive this long after capture, s.
    pub detection_delay: f64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        SensorConfig {
            fov_width: 80.0 * PI / 180.0,
            range: 10.0,
            frame_rate: 30.0,
            intrinsics: CameraIntrinsics::default(),
            image_width: 640,
            image_height: 480,
            col_stride: 8,
            row_stride: 80,
            depth_noise_0: 0.01,
            // Slope set so the expected absolute error reaches 0.2 m at
            // 4.5 m/s of apparent speed under zero-mean Gaussian noise.
            depth_noise_k: (0.2 * (PI / 2.0).sqrt() - 0.01) / 4.5,
            min_depth: 0.05,
            detection_delay: 0.18,
        }
    }
}

impl SensorConfig {
    /// Noise sigma for a return moving at `v_cam` in the image.
    pub fn depth_sigma(&self, v_cam: f64) -> f64 {
        self.depth_noise_0 + self.depth_noise_k * v_cam.abs()
    }
}

/// Everything one episode needs, grouped by subsystem.
#[derive(Clone, Debug, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct EpisodeConfig {
    pub sud: SudConfig,
    pub head: HeadConfig,
    pub tracker: TrackerConfig,
    pub grid: GridConfig,
    pub sample: SampleConfig,
    pub check: CheckConfig,
    pub sensor: SensorConfig,
    pub sync: SyncConfig,
    pub sim: SimConfig,
}
