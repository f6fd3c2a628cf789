//! Field-of-view camera synthesis. Each frame casts a pixel lattice of
//! depth rays against the scene and reports per-obstacle detections,
//! everything in camera terms (pixel, depth) so the consumer has to
//! reconstruct world points through its own synced pose estimates. Depth
//! noise grows with apparent image speed, so a fast-sweeping camera sees
//! worse than a steady one.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::config::SensorConfig;
use crate::geometry::{angular_difference, Stamp, Vec3};
use crate::sim::scenario::StaticShape;
use crate::tracker::{apparent_camera_speed, camera_from_world};

/// Robot and camera state frozen at the capture instant.
#[derive(Clone, Copy, Debug)]
pub struct CaptureState {
    pub stamp: Stamp,
    pub position: Vec3,
    pub velocity: Vec3,
    /// Camera optical axis heading in the world, rad.
    pub cam_heading: f64,
    /// Mount slew rate at capture, rad/s.
    pub cam_rate: f64,
    /// Fuselage yaw rate at capture, rad/s.
    pub yaw_rate: f64,
}

/// A dynamic obstacle as the sensor sees it: a ground cylinder.
#[derive(Clone, Copy, Debug)]
pub struct ObstacleState {
    pub position: Vec3,
    pub velocity: Vec3,
    pub radius: f64,
    pub height: f64,
}

/// One depth ray return.
#[derive(Clone, Copy, Debug)]
pub struct StaticHit {
    pub pixel: (f64, f64),
    pub depth: f64,
}

/// One detected dynamic obstacle, by scenario index.
#[derive(Clone, Copy, Debug)]
pub struct DynamicHit {
    pub pixel: (f64, f64),
    pub depth: f64,
    pub obstacle: usize,
}

#[derive(Clone, Debug)]
pub struct Frame {
    pub capture: Stamp,
    /// When the consumer may first see the frame.
    pub arrival: Stamp,
    pub statics: Vec<StaticHit>,
    pub detections: Vec<DynamicHit>,
}

fn lattice(extent: u32, stride: u32) -> impl Iterator<Item = u32> {
    let stride = stride.max(1);
    (0..).map(move |k| stride / 2 + k * stride).take_while(move |&u| u < extent)
}

fn nearest_hit(
    origin: Vec3,
    dir: Vec3,
    t_max: f64,
    statics: &[StaticShape],
    movers: &[ObstacleState],
) -> Option<f64> {
    let mut best: Option<f64> = None;
    for s in statics {
        if let Some(t) = s.ray_hit(origin, dir, best.unwrap_or(t_max)) {
            if best.map_or(true, |b| t < b) {
                best = Some(t);
            }
        }
    }
    for m in movers {
        let cyl = StaticShape::Cylinder {
            x: m.position.x,
            y: m.position.y,
            radius: m.radius,
            height: m.height,
        };
        if let Some(t) = cyl.ray_hit(origin, dir, best.unwrap_or(t_max)) {
            if best.map_or(true, |b| t < b) {
                best = Some(t);
            }
        }
    }
    best
}

/// Synthesizes one frame. Rays and detections are gated to the horizontal
/// wedge and the range; detections are additionally occluded by static
/// shapes along the sight line. Draws from `rng` in a fixed order, so a
/// seeded generator reproduces the frame bit for bit.
pub fn capture_frame(
    statics: &[StaticShape],
    movers: &[ObstacleState],
    cap: &CaptureState,
    cfg: &SensorConfig,
    rng: &mut impl Rng,
) -> Frame {
    let intr = &cfg.intrinsics;
    let half_fov = cfg.fov_width / 2.0;
    let fwd = Vec3::new(cap.cam_heading.cos(), cap.cam_heading.sin(), 0.0);
    let right = Vec3::new(cap.cam_heading.sin(), -cap.cam_heading.cos(), 0.0);
    let down = Vec3::new(0.0, 0.0, -1.0);

    let mut statics_out = Vec::new();
    for v in lattice(cfg.image_height, cfg.row_stride) {
        for u in lattice(cfg.image_width, cfg.col_stride) {
            let horiz = (u as f64 - intr.cx) / intr.fx;
            if horiz.atan().abs() > half_fov {
                continue;
            }
            let vert = (v as f64 - intr.cy) / intr.fy;
            let dir = fwd + right * horiz + down * vert;
            let unit = dir * (1.0 / dir.norm());
            let Some(t) = nearest_hit(cap.position, unit, cfg.range, statics, movers) else {
                continue;
            };
            let depth = t * unit.dot(fwd);
            let v_cam = apparent_camera_speed(
                t,
                cap.cam_rate,
                cap.yaw_rate,
                cap.cam_heading,
                cap.velocity,
                Vec3::ZERO,
            );
            let noise = Normal::new(0.0, cfg.depth_sigma(v_cam)).unwrap();
            let measured = depth + noise.sample(rng);
            if measured >= cfg.min_depth {
                statics_out.push(StaticHit { pixel: (u as f64, v as f64), depth: measured });
            }
        }
    }

    let mut detections = Vec::new();
    for (idx, m) in movers.iter().enumerate() {
        let target = Vec3::new(
            m.position.x,
            m.position.y,
            cap.position.z.clamp(0.0, m.height),
        );
        let rel = target - cap.position;
        let dist = rel.norm();
        if dist > cfg.range || dist <= cfg.min_depth {
            continue;
        }
        let bearing = rel.y.atan2(rel.x);
        if angular_difference(bearing, cap.cam_heading).abs() > half_fov {
            continue;
        }
        let unit = rel * (1.0 / dist);
        let occluded = statics
            .iter()
            .filter_map(|s| s.ray_hit(cap.position, unit, dist))
            .any(|t| t < dist - m.radius);
        if occluded {
            continue;
        }
        let Some((pixel, depth)) = camera_from_world(target, intr, cap.position, cap.cam_heading)
        else {
            continue;
        };
        let v_cam = apparent_camera_speed(
            dist,
            cap.cam_rate,
            cap.yaw_rate,
            cap.cam_heading,
            cap.velocity,
            m.velocity,
        );
        let noise = Normal::new(0.0, cfg.depth_sigma(v_cam)).unwrap();
        let measured = depth + noise.sample(rng);
        if measured >= cfg.min_depth {
            detections.push(DynamicHit { pixel, depth: measured, obstacle: idx });
        }
    }

    Frame {
        capture: cap.stamp,
        arrival: cap.stamp + cfg.detection_delay,
        statics: statics_out,
        detections,
    }
}
