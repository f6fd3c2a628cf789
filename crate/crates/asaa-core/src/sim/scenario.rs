//! Scenario description: arena bounds, static shapes, scripted movers,
//! and the goal script. Everything an episode needs besides the seed.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;

use crate::config::EpisodeConfig;
use crate::geometry::Vec3;

/// Axis-aligned arena extent.
#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Bounds {
    pub min: Vec3,
    pub max: Vec3,
}

impl Bounds {
    pub fn contains(&self, p: Vec3) -> bool {
        p.x >= self.min.x
            && p.x <= self.max.x
            && p.y >= self.min.y
            && p.y <= self.max.y
            && p.z >= self.min.z
            && p.z <= self.max.z
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }
}

/// Static scene geometry. Cylinders stand on the ground plane.
#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "snake_case"))]
pub enum StaticShape {
    Box { min: Vec3, max: Vec3 },
    Cylinder { x: f64, y: f64, radius: f64, height: f64 },
}

impl StaticShape {
    /// Distance from a point to the shape surface; zero inside.
    pub fn distance_to_point(&self, p: Vec3) -> f64 {
        match *self {
            StaticShape::Box { min, max } => {
                let dx = (min.x - p.x).max(0.0).max(p.x - max.x);
                let dy = (min.y - p.y).max(0.0).max(p.y - max.y);
                let dz = (min.z - p.z).max(0.0).max(p.z - max.z);
                (dx * dx + dy * dy + dz * dz).sqrt()
            }
            StaticShape::Cylinder { x, y, radius, height } => {
                let dr = ((p.x - x).powi(2) + (p.y - y).powi(2)).sqrt() - radius;
                let dz = (0.0 - p.z).max(0.0).max(p.z - height);
                let dr = dr.max(0.0);
                (dr * dr + dz * dz).sqrt()
            }
        }
    }

    /// First intersection of the ray `origin + t * dir` (unit `dir`) with
    /// the shape within `t_max`. An origin inside reports zero.
    pub fn ray_hit(&self, origin: Vec3, dir: Vec3, t_max: f64) -> Option<f64> {
        match *self {
            StaticShape::Box { min, max } => ray_box(origin, dir, min, max, t_max),
            StaticShape::Cylinder { x, y, radius, height } => {
                ray_cylinder(origin, dir, x, y, radius, height, t_max)
            }
        }
    }
}

fn ray_box(o: Vec3, d: Vec3, min: Vec3, max: Vec3, t_max: f64) -> Option<f64> {
    let mut t0 = 0.0f64;
    let mut t1 = t_max;
    let axes = [(o.x, d.x, min.x, max.x), (o.y, d.y, min.y, max.y), (o.z, d.z, min.z, max.z)];
    for (oa, da, mn, mx) in axes {
        if da.abs() < 1e-12 {
            if oa < mn || oa > mx {
                return None;
            }
        } else {
            let ta = (mn - oa) / da;
            let tb = (mx - oa) / da;
            let (ta, tb) = if ta <= tb { (ta, tb) } else { (tb, ta) };
            t0 = t0.max(ta);
            t1 = t1.min(tb);
            if t0 > t1 {
                return None;
            }
        }
    }
    Some(t0)
}

fn ray_cylinder(
    o: Vec3,
    d: Vec3,
    cx: f64,
    cy: f64,
    radius: f64,
    height: f64,
    t_max: f64,
) -> Option<f64> {
    let ox = o.x - cx;
    let oy = o.y - cy;
    let inside_radial = ox * ox + oy * oy <= radius * radius;
    if inside_radial && o.z >= 0.0 && o.z <= height {
        return Some(0.0);
    }
    let mut best: Option<f64> = None;
    let mut consider = |t: f64| {
        if t >= 0.0 && t <= t_max && best.map_or(true, |b| t < b) {
            best = Some(t);
        }
    };
    // Side surface.
    let a = d.x * d.x + d.y * d.y;
    if a > 1e-12 {
        let b = 2.0 * (ox * d.x + oy * d.y);
        let c = ox * ox + oy * oy - radius * radius;
        let disc = b * b - 4.0 * a * c;
        if disc >= 0.0 {
            let sq = disc.sqrt();
            for t in [(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)] {
                let z = o.z + t * d.z;
                if z >= 0.0 && z <= height {
                    consider(t);
                }
            }
        }
    }
    // Top cap.
    if d.z.abs() > 1e-12 {
        let t = (height - o.z) / d.z;
        let px = ox + t * d.x;
        let py = oy + t * d.y;
        if px * px + py * py <= radius * radius {
            consider(t);
        }
    }
    best
}

/// How a mover treats the end of its waypoint list.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum PathMode {
    /// Last waypoint links back to the first.
    Cycle,
    /// Retrace the path backwards, forever.
    Bounce,
}

/// Scripted dynamic obstacle: a ground cylinder walking a waypoint path
/// at constant speed. Position is a closed form of time, so obstacle
/// motion is exactly reproducible at any query instant.
#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct MovingObstacle {
    pub label: String,
    pub radius: f64,
    pub height: f64,
    pub speed: f64,
    pub waypoints: Vec<Vec3>,
    pub mode: PathMode,
}

impl MovingObstacle {
    fn segments(&self) -> Vec<(Vec3, Vec3, f64)> {
        let mut segs = Vec::new();
        for w in self.waypoints.windows(2) {
            let len = (w[1] - w[0]).norm();
            if len > 0.0 {
                segs.push((w[0], w[1], len));
            }
        }
        if self.mode == PathMode::Cycle && self.waypoints.len() > 1 {
            let a = *self.waypoints.last().unwrap();
            let b = self.waypoints[0];
            let len = (b - a).norm();
            if len > 0.0 {
                segs.push((a, b, len));
            }
        }
        segs
    }

    fn arc_state(&self, t: f64) -> (Vec3, Vec3) {
        let Some(&first) = self.waypoints.first() else {
            return (Vec3::ZERO, Vec3::ZERO);
        };
        let segs = self.segments();
        let total: f64 = segs.iter().map(|s| s.2).sum();
        if self.speed <= 0.0 || total <= 0.0 {
            return (first, Vec3::ZERO);
        }
        let s_raw = self.speed * t.max(0.0);
        let (mut s, sign) = match self.mode {
            PathMode::Cycle => (s_raw % total, 1.0),
            PathMode::Bounce => {
                let m = s_raw % (2.0 * total);
                if m <= total {
                    (m, 1.0)
                } else {
                    (2.0 * total - m, -1.0)
                }
            }
        };
        for (a, b, len) in &segs {
            if s <= *len {
                let dir = (*b - *a) * (1.0 / len);
                return (*a + dir * s, dir * (self.speed * sign));
            }
            s -= len;
        }
        let (_, b, _) = segs[segs.len() - 1];
        (b, Vec3::ZERO)
    }

    pub fn position_at(&self, t: f64) -> Vec3 {
        self.arc_state(t).0
    }

    pub fn velocity_at(&self, t: f64) -> Vec3 {
        self.arc_state(t).1
    }
}

/// What ends a goal's tenure.
#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "snake_case"))]
pub enum Trigger {
    /// The robot comes within `radius` of the goal.
    Reach { radius: f64 },
    /// Wall-clock switch at `at` seconds.
    Timed { at: f64 },
}

#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Goal {
    pub position: Vec3,
    pub trigger: Trigger,
}

/// After the scripted sequence runs out, keep spawning goals uniformly in
/// the half of the arena opposite the robot until `max_events` goal
/// events have fired.
#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RespawnRule {
    /// Reach radius of respawned goals.
    pub radius: f64,
    /// Cap on total goal events for the episode.
    pub max_events: u32,
}

#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct GoalScript {
    pub sequence: Vec<Goal>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub respawn: Option<RespawnRule>,
}

#[derive(Clone, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Scenario {
    pub name: String,
    /// Free-form preset family marker, e.g. "pedestrian_street".
    #[cfg_attr(feature = "serde", serde(default))]
    pub tag: Option<String>,
    pub bounds: Bounds,
    #[cfg_attr(feature = "serde", serde(default))]
    pub static_obstacles: Vec<StaticShape>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub dynamic_obstacles: Vec<MovingObstacle>,
    pub robot_start: Vec3,
    #[cfg_attr(feature = "serde", serde(default))]
    pub robot_heading: f64,
    pub goals: GoalScript,
    pub episode_length: f64,
    #[cfg_attr(feature = "serde", serde(default = "default_robot_radius"))]
    pub robot_radius: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub config: EpisodeConfig,
}

#[cfg(feature = "serde")]
fn default_robot_radius() -> f64 {
    0.3
}

/// Validation outcome: hard errors and advisory warnings, each naming the
/// offending field.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

/// Speed band the pedestrian-street presets are defined over, m/s.
pub const PEDESTRIAN_SPEED_BAND: (f64, f64) = (0.5, 1.5);

impl Scenario {
    pub fn validate(&self) -> ValidationReport {
        let mut r = ValidationReport::default();
        let err = &mut r.errors;

        if !(self.bounds.min.x < self.bounds.max.x
            && self.bounds.min.y < self.bounds.max.y
            && self.bounds.min.z < self.bounds.max.z)
        {
            err.push(String::from("bounds: min must be strictly below max on every axis"));
        }
        if !(self.episode_length > 0.0) {
            err.push(format!("episode_length: must be positive, got {}", self.episode_length));
        }
        if !(self.robot_radius > 0.0) {
            err.push(format!("robot_radius: must be positive, got {}", self.robot_radius));
        }
        if !self.bounds.contains(self.robot_start) {
            err.push(String::from("robot_start: outside bounds"));
        }
        if self.goals.sequence.is_empty() {
            err.push(String::from("goals.sequence: must contain at least one goal"));
        }
        for (i, g) in self.goals.sequence.iter().enumerate() {
            match g.trigger {
                Trigger::Reach { radius } if !(radius > 0.0) => {
                    err.push(format!("goals.sequence[{i}].trigger.radius: must be positive"));
                }
                Trigger::Timed { at } if !(at >= 0.0) => {
                    err.push(format!("goals.sequence[{i}].trigger.at: must be non-negative"));
                }
                _ => {}
            }
        }
        if let Some(rule) = &self.goals.respawn {
            if !(rule.radius > 0.0) {
                err.push(String::from("goals.respawn.radius: must be positive"));
            }
            if rule.max_events == 0 {
                err.push(String::from("goals.respawn.max_events: must be at least 1"));
            }
        }
        for (i, s) in self.static_obstacles.iter().enumerate() {
            match *s {
                StaticShape::Box { min, max } => {
                    if !(min.x < max.x && min.y < max.y && min.z < max.z) {
                        err.push(format!("static_obstacles[{i}]: box min must be below max"));
                    }
                }
                StaticShape::Cylinder { radius, height, .. } => {
                    if !(radius > 0.0) {
                        err.push(format!("static_obstacles[{i}].radius: must be positive"));
                    }
                    if !(height > 0.0) {
                        err.push(format!("static_obstacles[{i}].height: must be positive"));
                    }
                }
            }
        }
        for (i, d) in self.dynamic_obstacles.iter().enumerate() {
            if !(d.radius > 0.0) {
                err.push(format!("dynamic_obstacles[{i}].radius: must be positive"));
            }
            if !(d.height > 0.0) {
                err.push(format!("dynamic_obstacles[{i}].height: must be positive"));
            }
            if !(d.speed >= 0.0) {
                err.push(format!("dynamic_obstacles[{i}].speed: must be non-negative"));
            }
            if d.waypoints.is_empty() {
                err.push(format!("dynamic_obstacles[{i}].waypoints: must not be empty"));
            }
        }

        let sim = &self.config.sim;
        if !(sim.control_rate > 0.0 && sim.physics_rate > 0.0) {
            err.push(String::from("config.sim: rates must be positive"));
        } else {
            let ratio = sim.physics_rate / sim.control_rate;
            if (ratio - ratio.round()).abs() > 1e-9 || ratio < 1.0 {
                err.push(String::from(
                    "config.sim: physics_rate must be a whole multiple of control_rate",
                ));
            }
        }
        let grid = &self.config.grid;
        let zr = grid.z_resolution / grid.resolution;
        if (zr * zr - (zr * zr).round()).abs() > 1e-9 {
            err.push(String::from(
                "config.grid: z_resolution^2 must be a whole multiple of resolution^2",
            ));
        }
        let buckets = 2.0 * core::f64::consts::PI / self.config.sud.bucket_width;
        if !(self.config.sud.bucket_width > 0.0) || (buckets - buckets.round()).abs() > 1e-9 {
            err.push(String::from("config.sud.bucket_width: must divide the full circle"));
        }
        if !(self.config.sensor.frame_rate > 0.0) {
            err.push(String::from("config.sensor.frame_rate: must be positive"));
        }

        if self.tag.as_deref() == Some("pedestrian_street") {
            let (lo, hi) = PEDESTRIAN_SPEED_BAND;
            for (i, d) in self.dynamic_obstacles.iter().enumerate() {
                if d.speed < lo || d.speed > hi {
                    r.warnings.push(format!(
                        "dynamic_obstacles[{i}].speed: {} outside the pedestrian band [{lo}, {hi}]",
                        d.speed
                    ));
                }
            }
        }
        r
    }
}
