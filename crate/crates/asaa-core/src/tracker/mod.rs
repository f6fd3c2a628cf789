//! World-frame multi-obstacle tracker. Detections arrive as world
//! positions (reconstructed from camera pixels plus synced pose) stamped
//! at capture time, which trails processing by the detection delay.
//! Tracks run one constant-velocity Kalman filter per world axis, so a
//! rotating camera changes nothing about the estimate.

mod assignment;

use crate::geometry::{Stamp, Vec2, Vec3};
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;

/// Variance floor for downstream collision checks, m^2 per axis.
pub const COVARIANCE_FLOOR: f64 = 0.01;

#[derive(Clone, Debug)]
pub struct Detection {
    /// World position at capture time.
    pub position: Vec3,
    /// Capture time; trails processing time by the detection delay.
    pub stamp: Stamp,
    pub radius: f64,
    pub height: f64,
    pub label: String,
}

#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct TrackerConfig {
    /// Association gate on Euclidean world distance, meters.
    pub gate_radius: f64,
    /// Assignments before a track is trusted by planners.
    pub confirm_hits: u32,
    /// Tracks die after this long without a detection, seconds.
    pub stale_timeout: f64,
    /// Position measurement noise, meters (one sigma).
    pub meas_noise: f64,
    /// Process noise: white acceleration, m/s^2 (one sigma per axis).
    pub accel_sigma: f64,
    /// Per-label override of `accel_sigma`.
    pub accel_sigma_by_label: BTreeMap<String, f64>,
    /// Exponential smoothing factor for radius and height.
    pub shape_smoothing: f64,
    /// Velocity variance given to a newborn track.
    pub init_velocity_var: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        TrackerConfig {
            gate_radius: 1.0,
            confirm_hits: 2,
            stale_timeout: 2.0,
            meas_noise: 0.1,
            accel_sigma: 1.0,
            accel_sigma_by_label: BTreeMap::new(),
            shape_smoothing: 0.5,
            init_velocity_var: 1.0,
        }
    }
}

impl TrackerConfig {
    fn sigma_for(&self, label: &str) -> f64 {
        *self.accel_sigma_by_label.get(label).unwrap_or(&self.accel_sigma)
    }
}

/// 2x2 symmetric covariance over [position, velocity] of one axis.
pub type AxisCov = [[f64; 2]; 2];

#[derive(Clone, Copy, Debug)]
pub struct AxisState {
    pub pos: f64,
    pub vel: f64,
    pub cov: AxisCov,
}

#[derive(Clone, Debug)]
pub struct TrackedObstacle {
    pub id: u64,
    pub label: String,
    pub axes: [AxisState; 3],
    /// Process noise sigma per axis.
    pub sigma: [f64; 3],
    pub radius: f64,
    pub height: f64,
    /// Stamp of the newest detection folded in.
    pub last_seen: Stamp,
    /// Time the state estimate refers to.
    pub stamp: Stamp,
    pub hits: u32,
}

impl TrackedObstacle {
    pub fn position(&self) -> Vec3 {
        Vec3::new(self.axes[0].pos, self.axes[1].pos, self.axes[2].pos)
    }

    pub fn velocity(&self) -> Vec3 {
        Vec3::new(self.axes[0].vel, self.axes[1].vel, self.axes[2].vel)
    }

    pub fn confirmed(&self, cfg: &TrackerConfig) -> bool {
        self.hits >= cfg.confirm_hits
    }
}

/// Constant-velocity process covariance for one axis over horizon `t`:
/// white acceleration with deviation `sigma` integrated twice.
pub fn process_covariance(sigma: f64, t: f64) -> AxisCov {
    let t2 = t * t;
    let t3 = t2 * t;
    let t4 = t2 * t2;
    let s2 = sigma * sigma;
    [
        [0.25 * t4 * s2, 0.5 * t3 * s2],
        [0.5 * t3 * s2, t2 * s2],
    ]
}

#[derive(Clone, Copy, Debug)]
pub struct PredictedAxis {
    pub pos: f64,
    pub vel: f64,
    pub cov: AxisCov,
}

/// Coasts one axis forward `t` seconds: straight-line mean, process
/// covariance stacked onto the current estimate covariance.
pub fn kf_predict_axis(axis: &AxisState, sigma: f64, t: f64) -> PredictedAxis {
    assert!(t >= 0.0, "prediction horizon must be non-negative");
    let q = process_covariance(sigma, t);
    PredictedAxis {
        pos: axis.pos + axis.vel * t,
        vel: axis.vel,
        cov: [
            [axis.cov[0][0] + q[0][0], axis.cov[0][1] + q[0][1]],
            [axis.cov[1][0] + q[1][0], axis.cov[1][1] + q[1][1]],
        ],
    }
}

/// Full-track prediction over horizon `t`.
pub fn kf_predict(track: &TrackedObstacle, t: f64) -> [PredictedAxis; 3] {
    [
        kf_predict_axis(&track.axes[0], track.sigma[0], t),
        kf_predict_axis(&track.axes[1], track.sigma[1], t),
        kf_predict_axis(&track.axes[2], track.sigma[2], t),
    ]
}

/// Per-axis position variance of a prediction, floored for downstream
/// collision geometry.
pub fn predicted_position_variance(track: &TrackedObstacle, t: f64) -> [f64; 3] {
    let pred = kf_predict(track, t);
    [
        pred[0].cov[0][0].max(COVARIANCE_FLOOR),
        pred[1].cov[0][0].max(COVARIANCE_FLOOR),
        pred[2].cov[0][0].max(COVARIANCE_FLOOR),
    ]
}

/// Advances one filter axis `t` seconds in place: straight-line mean and
/// full constant-velocity covariance transport plus process noise. The
/// cross terms matter here; without them the velocity estimate rings for
/// seconds. Downstream prediction keeps the additive form of
/// [`kf_predict_axis`].
fn advance_axis(axis: &mut AxisState, sigma: f64, t: f64) {
    let q = process_covariance(sigma, t);
    let p = axis.cov;
    let p01 = p[0][1] + t * p[1][1];
    axis.cov = [
        [
            p[0][0] + t * (p[0][1] + p[1][0]) + t * t * p[1][1] + q[0][0],
            p01 + q[0][1],
        ],
        [p01 + q[1][0], p[1][1] + q[1][1]],
    ];
    axis.pos += axis.vel * t;
}

fn correct_axis(axis: &mut AxisState, z: f64, meas_var: f64) {
    let s = axis.cov[0][0] + meas_var;
    let k0 = axis.cov[0][0] / s;
    let k1 = axis.cov[1][0] / s;
    let y = z - axis.pos;
    axis.pos += k0 * y;
    axis.vel += k1 * y;
    let p = axis.cov;
    axis.cov = [
        [(1.0 - k0) * p[0][0], (1.0 - k0) * p[0][1]],
        [p[1][0] - k1 * p[0][0], p[1][1] - k1 * p[0][1]],
    ];
}

#[derive(Clone, Debug, Default)]
pub struct Tracker {
    pub tracks: Vec<TrackedObstacle>,
    next_id: u64,
}

impl Tracker {
    pub fn new() -> Self {
        Tracker::default()
    }

    pub fn confirmed<'a>(
        &'a self,
        cfg: &'a TrackerConfig,
    ) -> impl Iterator<Item = &'a TrackedObstacle> {
        self.tracks.iter().filter(move |t| t.confirmed(cfg))
    }

    /// One tracking cycle: coast every track to `now`, pair detections by
    /// gated min-cost assignment, fold paired measurements in, spawn
    /// tracks for the leftovers, drop the stale.
    pub fn step(&mut self, detections: &[Detection], now: Stamp, cfg: &TrackerConfig) {
        for track in self.tracks.iter_mut() {
            let dt = now - track.stamp;
            debug_assert!(dt >= 0.0, "time went backwards");
            for (axis, sigma) in track.axes.iter_mut().zip(track.sigma) {
                advance_axis(axis, sigma, dt.max(0.0));
            }
            track.stamp = now;
        }

        let tracks = &self.tracks;
        let pairing = assignment::assign_within_gate(
            tracks.len(),
            detections.len(),
            |r, c| tracks[r].position().distance(detections[c].position),
            cfg.gate_radius,
        );

        let meas_var = cfg.meas_noise * cfg.meas_noise;
        let mut det_used = alloc::vec![false; detections.len()];
        for (r, paired) in pairing.iter().enumerate() {
            let Some(c) = paired else { continue };
            det_used[*c] = true;
            let det = &detections[*c];
            let track = &mut self.tracks[r];
            correct_axis(&mut track.axes[0], det.position.x, meas_var);
            correct_axis(&mut track.axes[1], det.position.y, meas_var);
            correct_axis(&mut track.axes[2], det.position.z, meas_var);
            let a = cfg.shape_smoothing;
            track.radius = (1.0 - a) * track.radius + a * det.radius;
            track.height = (1.0 - a) * track.height + a * det.height;
            track.hits += 1;
            track.last_seen = det.stamp;
        }

        for (c, det) in detections.iter().enumerate() {
            if det_used[c] {
                continue;
            }
            let sigma = cfg.sigma_for(&det.label);
            let axis = |pos: f64| AxisState {
                pos,
                vel: 0.0,
                cov: [[meas_var, 0.0], [0.0, cfg.init_velocity_var]],
            };
            self.tracks.push(TrackedObstacle {
                id: self.next_id,
                label: det.label.clone(),
                axes: [axis(det.position.x), axis(det.position.y), axis(det.position.z)],
                sigma: [sigma; 3],
                radius: det.radius,
                height: det.height,
                last_seen: det.stamp,
                stamp: det.stamp,
                hits: 1,
            });
            self.next_id += 1;
        }

        self.tracks.retain(|t| now - t.last_seen <= cfg.stale_timeout);
    }
}

#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct CameraIntrinsics {
    pub fx: f64,
    pub fy: f64,
    pub cx: f64,
    pub cy: f64,
}

impl Default for CameraIntrinsics {
    fn default() -> Self {
        CameraIntrinsics { fx: 386.0, fy: 386.0, cx: 320.0, cy: 240.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NonPositiveDepth;

impl core::fmt::Display for NonPositiveDepth {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "depth must be positive")
    }
}

/// Camera frame axes in world terms, for a camera at a yaw-only heading:
/// z looks forward, x right, y down.
fn camera_axes(heading: f64) -> (Vec3, Vec3, Vec3) {
    let fwd = Vec3::new(heading.cos(), heading.sin(), 0.0);
    let right = Vec3::new(heading.sin(), -heading.cos(), 0.0);
    let down = Vec3::new(0.0, 0.0, -1.0);
    (fwd, right, down)
}

/// Back-projects a pixel with depth into a world point.
pub fn world_from_camera(
    pixel: (f64, f64),
    depth: f64,
    intr: &CameraIntrinsics,
    cam_pos: Vec3,
    cam_heading: f64,
) -> Result<Vec3, NonPositiveDepth> {
    if !(depth > 0.0) {
        return Err(NonPositiveDepth);
    }
    let x = (pixel.0 - intr.cx) * depth / intr.fx;
    let y = (pixel.1 - intr.cy) * depth / intr.fy;
    let (fwd, right, down) = camera_axes(cam_heading);
    Ok(cam_pos + fwd * depth + right * x + down * y)
}

/// Projects a world point into the camera. `None` behind the camera.
pub fn camera_from_world(
    point: Vec3,
    intr: &CameraIntrinsics,
    cam_pos: Vec3,
    cam_heading: f64,
) -> Option<((f64, f64), f64)> {
    let (fwd, right, down) = camera_axes(cam_heading);
    let rel = point - cam_pos;
    let depth = rel.dot(fwd);
    if depth <= 0.0 {
        return None;
    }
    let u = intr.cx + intr.fx * rel.dot(right) / depth;
    let v = intr.cy + intr.fy * rel.dot(down) / depth;
    Some(((u, v), depth))
}

/// Builds a world-frame detection from one camera observation plus the
/// synced pose for its corrected stamp.
#[allow(clippy::too_many_arguments)]
pub fn detection_from_camera(
    pixel: (f64, f64),
    depth: f64,
    intr: &CameraIntrinsics,
    cam_pos: Vec3,
    cam_heading: f64,
    stamp: Stamp,
    radius: f64,
    height: f64,
    label: &str,
) -> Result<Detection, NonPositiveDepth> {
    let position = world_from_camera(pixel, depth, intr, cam_pos, cam_heading)?;
    Ok(Detection {
        position,
        stamp,
        radius,
        height,
        label: String::from(label),
    })
}

/// Apparent speed of an obstacle in the image for the blur model: lateral
/// sweep of the rotating camera plus the relative linear motion.
pub fn apparent_camera_speed(
    range: f64,
    cam_rate: f64,
    yaw_rate: f64,
    cam_heading: f64,
    v_robot: Vec3,
    v_obstacle: Vec3,
) -> f64 {
    let lateral = Vec2::from_heading(cam_heading + core::f64::consts::FRAC_PI_2);
    let sweep = range * (cam_rate + yaw_rate);
    let rel = v_robot - v_obstacle;
    let v = Vec3::new(
        sweep * lateral.x + rel.x,
        sweep * lateral.y + rel.y,
        rel.z,
    );
    v.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn det(pos: Vec3, stamp: f64) -> Detection {
        Detection {
            position: pos,
            stamp,
            radius: 0.3,
            height: 1.8,
            label: "pedestrian".to_string(),
        }
    }

    #[test]
    fn process_covariance_matches_hand_values() {
        let q = process_covariance(1.0, 1.0);
        assert_eq!(q, [[0.25, 0.5], [0.5, 1.0]]);
        let q = process_covariance(2.0, 0.5);
        assert!((q[0][0] - 0.25 * 0.0625 * 4.0).abs() < 1e-15);
        assert!((q[1][1] - 0.25 * 4.0).abs() < 1e-15);
    }

    #[test]
    fn prediction_coasts_the_mean() {
        let axis = AxisState { pos: 1.0, vel: 2.0, cov: [[1.0, 0.0], [0.0, 1.0]] };
        let p = kf_predict_axis(&axis, 1.0, 0.5);
        assert_eq!(p.pos, 2.0);
        assert_eq!(p.vel, 2.0);
    }

    #[test]
    fn zero_horizon_keeps_the_estimate_covariance() {
        let axis = AxisState { pos: 0.0, vel: 0.0, cov: [[0.7, 0.1], [0.1, 0.9]] };
        let p = kf_predict_axis(&axis, 3.0, 0.0);
        assert_eq!(p.cov, axis.cov);
    }

    #[test]
    #[should_panic]
    fn negative_horizon_is_refused() {
        let axis = AxisState { pos: 0.0, vel: 0.0, cov: [[1.0, 0.0], [0.0, 1.0]] };
        let _ = kf_predict_axis(&axis, 1.0, -0.1);
    }

    #[test]
    fn staleness_boundary_is_inclusive() {
        let cfg = TrackerConfig::default();
        let mut tracker = Tracker::new();
        tracker.step(&[det(Vec3::ZERO, 0.0)], 0.0, &cfg);
        assert_eq!(tracker.tracks.len(), 1);
        tracker.step(&[], 2.0, &cfg);
        assert_eq!(tracker.tracks.len(), 1, "exactly at the timeout survives");
        tracker.step(&[], 2.1, &cfg);
        assert!(tracker.tracks.is_empty(), "past the timeout dies");
    }

    #[test]
    fn empty_detections_only_coast() {
        let cfg = TrackerConfig::default();
        let mut tracker = Tracker::new();
        tracker.step(&[det(Vec3::new(1.0, 0.0, 0.0), 0.0)], 0.0, &cfg);
        let before = tracker.tracks[0].clone();
        tracker.step(&[], 0.5, &cfg);
        let after = &tracker.tracks[0];
        assert_eq!(after.hits, before.hits);
        assert_eq!(after.position(), before.position(), "zero velocity keeps position");
        assert!(after.axes[0].cov[0][0] > before.axes[0].cov[0][0]);
    }

    #[test]
    fn association_prefers_total_cost() {
        let cfg = TrackerConfig::default();
        let mut tracker = Tracker::new();
        tracker.step(
            &[det(Vec3::new(0.0, 0.0, 1.0), 0.0), det(Vec3::new(1.0, 0.0, 1.0), 0.0)],
            0.0,
            &cfg,
        );
        let ids: Vec<u64> = tracker.tracks.iter().map(|t| t.id).collect();
        tracker.step(
            &[det(Vec3::new(0.1, 0.0, 1.0), 0.1), det(Vec3::new(0.9, 0.0, 1.0), 0.1)],
            0.1,
            &cfg,
        );
        assert_eq!(tracker.tracks.len(), 2, "no new tracks spawned");
        let t0 = tracker.tracks.iter().find(|t| t.id == ids[0]).unwrap();
        let t1 = tracker.tracks.iter().find(|t| t.id == ids[1]).unwrap();
        assert!(t0.position().x < 0.5);
        assert!(t1.position().x > 0.5);
        assert!(t0.confirmed(&cfg) && t1.confirmed(&cfg));
    }

    #[test]
    fn correction_contracts_position_covariance() {
        let mut axis = AxisState { pos: 0.0, vel: 0.0, cov: [[1.0, 0.0], [0.0, 1.0]] };
        correct_axis(&mut axis, 0.3, 0.01);
        assert!(axis.cov[0][0] < 1.0);
        assert!((axis.cov[0][1] - axis.cov[1][0]).abs() < 1e-15, "stays symmetric");
    }

    #[test]
    fn velocity_estimate_converges_on_a_straight_mover() {
        let cfg = TrackerConfig::default();
        let mut tracker = Tracker::new();
        let v = Vec3::new(1.2, -0.4, 0.0);
        for k in 0..30 {
            let t = k as f64 * 0.05;
            tracker.step(&[det(Vec3::new(5.0, 2.0, 1.0) + v * t, t)], t, &cfg);
        }
        let track = &tracker.tracks[0];
        assert!((track.velocity() - v).norm() < 0.05, "velocity {:?}", track.velocity());
    }

    #[test]
    fn filter_advance_transports_cross_covariance() {
        let mut axis = AxisState { pos: 1.0, vel: 2.0, cov: [[0.5, 0.2], [0.2, 0.8]] };
        advance_axis(&mut axis, 1.0, 0.5);
        let q = process_covariance(1.0, 0.5);
        assert_eq!(axis.pos, 2.0);
        assert_eq!(axis.vel, 2.0);
        let want00 = 0.5 + 0.5 * (0.2 + 0.2) + 0.25 * 0.8 + q[0][0];
        let want01 = 0.2 + 0.5 * 0.8 + q[0][1];
        assert!((axis.cov[0][0] - want00).abs() < 1e-15);
        assert!((axis.cov[0][1] - want01).abs() < 1e-15);
        assert_eq!(axis.cov[0][1], axis.cov[1][0], "stays symmetric");
    }

    #[test]
    fn projection_round_trips() {
        let intr = CameraIntrinsics::default();
        let cam = Vec3::new(2.0, -1.0, 1.2);
        let heading = 0.8;
        let point = Vec3::new(5.0, 1.5, 0.7);
        let ((u, v), depth) = camera_from_world(point, &intr, cam, heading).unwrap();
        let back = world_from_camera((u, v), depth, &intr, cam, heading).unwrap();
        assert!((back - point).norm() < 1e-12);
    }

    #[test]
    fn center_pixel_lands_on_the_optical_axis() {
        let intr = CameraIntrinsics::default();
        let p = world_from_camera((intr.cx, intr.cy), 3.0, &intr, Vec3::ZERO, 0.0).unwrap();
        assert!((p - Vec3::new(3.0, 0.0, 0.0)).norm() < 1e-12);
        let p = world_from_camera((intr.cx, intr.cy), 3.0, &intr, Vec3::ZERO, core::f64::consts::FRAC_PI_2).unwrap();
        assert!((p - Vec3::new(0.0, 3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn lateral_pixel_offsets_by_depth_over_focal() {
        let intr = CameraIntrinsics::default();
        let p = world_from_camera((intr.cx + intr.fx, intr.cy), 2.0, &intr, Vec3::ZERO, 0.0).unwrap();
        let lateral = p - Vec3::new(2.0, 0.0, 0.0);
        assert!((lateral.norm() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn non_positive_depth_is_an_error() {
        let intr = CameraIntrinsics::default();
        assert!(world_from_camera((0.0, 0.0), 0.0, &intr, Vec3::ZERO, 0.0).is_err());
        assert!(world_from_camera((0.0, 0.0), -1.0, &intr, Vec3::ZERO, 0.0).is_err());
    }

    #[test]
    fn camera_motion_does_not_move_world_tracks() {
        let cfg = TrackerConfig::default();
        let intr = CameraIntrinsics::default();
        let target = |t: f64| Vec3::new(4.0, 0.5 * t, 0.9);

        // Pipeline A: camera fixed. Pipeline B: camera orbiting and
        // spinning, observing the same world target.
        let mut a = Tracker::new();
        let mut b = Tracker::new();
        for k in 0..40 {
            let t = k as f64 * 0.05;
            let p = target(t);

            let d_a = {
                let (pix, depth) = camera_from_world(p, &intr, Vec3::ZERO, 0.0).unwrap();
                detection_from_camera(pix, depth, &intr, Vec3::ZERO, 0.0, t, 0.3, 1.8, "x").unwrap()
            };
            let cam_pos = Vec3::new((0.3 * t).sin(), -1.0 + 0.2 * t, 1.0);
            let heading = 0.9 * t;
            let d_b = {
                let (pix, depth) = camera_from_world(p, &intr, cam_pos, heading).unwrap();
                detection_from_camera(pix, depth, &intr, cam_pos, heading, t, 0.3, 1.8, "x").unwrap()
            };

            a.step(&[d_a], t, &cfg);
            b.step(&[d_b], t, &cfg);
        }
        let ta = &a.tracks[0];
        let tb = &b.tracks[0];
        assert!((ta.position() - tb.position()).norm() < 1e-9);
        assert!((ta.velocity() - tb.velocity()).norm() < 1e-9);
    }

    #[test]
    fn sampled_spread_matches_process_covariance() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let sigma = 0.8;
        let t = 1.5;
        let n = 20_000;
        let mut sum = [0.0f64; 2];
        let mut sq = [[0.0f64; 2]; 2];
        for _ in 0..n {
            // Box-Muller keeps this dependency-light.
            let u1: f64 = rng.gen_range(1e-12..1.0);
            let u2: f64 = rng.gen_range(0.0..core::f64::consts::TAU);
            let a = sigma * (-2.0 * u1.ln()).sqrt() * u2.cos();
            let s = [0.5 * a * t * t, a * t];
            sum[0] += s[0];
            sum[1] += s[1];
            for i in 0..2 {
                for j in 0..2 {
                    sq[i][j] += s[i] * s[j];
                }
            }
        }
        let mean = [sum[0] / n as f64, sum[1] / n as f64];
        let q = process_covariance(sigma, t);
        for i in 0..2 {
            for j in 0..2 {
                let emp = sq[i][j] / n as f64 - mean[i] * mean[j];
                let rel = (emp - q[i][j]).abs() / q[i][j].abs();
                assert!(rel < 0.1, "entry ({i},{j}): {emp} vs {}", q[i][j]);
            }
        }
    }
}
