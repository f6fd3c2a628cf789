//! Flight path planning: sample goal candidates inside a vision-aligned
//! cone, connect each with a rest-to-rest quintic primitive, and accept
//! the best candidate that survives a static clearance check against the
//! distance field and a dynamic check against tracked obstacles measured
//! in Mahalanobis distance. When nothing survives the robot hovers.
//!
//! Both checks share one rule over the setpoint lattice: a setpoint may
//! sit closer than the threshold only if it is no closer than the one
//! before it, so paths already in a tight spot may hold or back out, but
//! never dig in.

use crate::geometry::{Stamp, Vec3};
use crate::tracker::{predicted_position_variance, TrackedObstacle};
use crate::world::DistanceField;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;

#[derive(Clone, Copy, Debug, Default)]
pub struct RobotState {
    pub position: Vec3,
    pub velocity: Vec3,
    pub acceleration: Vec3,
    pub yaw: f64,
    pub stamp: Stamp,
}

#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SampleConfig {
    /// Candidates must deviate from the goal direction by less than this.
    pub theta_val: f64,
    /// Candidate radius bound, m.
    pub l_vis: f64,
    /// Accepted candidates per replan.
    pub n_samples: usize,
    pub v_max: f64,
    pub a_max: f64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            theta_val: 2.0 * core::f64::consts::FRAC_PI_3,
            l_vis: 1.5,
            n_samples: 200,
            v_max: 1.0,
            a_max: 2.0,
        }
    }
}

#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct CheckConfig {
    /// Euclidean clearance floor against the static field, m.
    pub d_min_static: f64,
    /// Squared-Mahalanobis clearance floor against tracks.
    pub d_min_dynamic: f64,
    /// Setpoint lattice interval, s.
    pub dt: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self { d_min_static: 0.5, d_min_dynamic: 0.65, dt: 0.05 }
    }
}

/// The goal coincides with the robot, so no cone exists to sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegenerateGoal;

impl core::fmt::Display for DegenerateGoal {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "goal coincides with the robot position")
    }
}

#[cfg(feature = "std")]
impl std::error::Error for DegenerateGoal {}

/// Membership predicate for the sampling region: within the radius bound
/// and strictly inside the deviation cone.
pub fn in_sampling_region(p: Vec3, p_rob: Vec3, p_goal: Vec3, cfg: &SampleConfig) -> bool {
    let l1 = p_goal - p_rob;
    let l2 = p - p_rob;
    l2.norm() <= cfg.l_vis && l1.angle_to(l2) < cfg.theta_val
}

/// Uniform candidates over the cone, drawn by rejection from the
/// enclosing ball. Also reports how many ball draws were needed, which
/// exposes the cone-to-ball volume ratio.
pub fn sample_candidates_with_attempts(
    p_rob: Vec3,
    p_goal: Vec3,
    cfg: &SampleConfig,
    rng: &mut impl Rng,
) -> Result<(Vec<Vec3>, u64), DegenerateGoal> {
    if (p_goal - p_rob).norm() == 0.0 {
        return Err(DegenerateGoal);
    }
    let mut out = Vec::with_capacity(cfg.n_samples);
    let mut attempts = 0u64;
    while out.len() < cfg.n_samples {
        let v = Vec3::new(
            rng.gen_range(-cfg.l_vis..=cfg.l_vis),
            rng.gen_range(-cfg.l_vis..=cfg.l_vis),
            rng.gen_range(-cfg.l_vis..=cfg.l_vis),
        );
        if v.norm() > cfg.l_vis {
            continue;
        }
        attempts += 1;
        let p = p_rob + v;
        if in_sampling_region(p, p_rob, p_goal, cfg) {
            out.push(p);
        }
    }
    Ok((out, attempts))
}

pub fn sample_candidates(
    p_rob: Vec3,
    p_goal: Vec3,
    cfg: &SampleConfig,
    rng: &mut impl Rng,
) -> Result<Vec<Vec3>, DegenerateGoal> {
    sample_candidates_with_attempts(p_rob, p_goal, cfg, rng).map(|(v, _)| v)
}

/// Candidate score: distance to goal plus a mild penalty on angular
/// deviation from the goal direction.
pub fn candidate_cost(p: Vec3, p_rob: Vec3, p_goal: Vec3, cfg: &SampleConfig) -> f64 {
    let angle = (p_goal - p_rob).angle_to(p - p_rob);
    (p - p_goal).norm() + 0.5 * cfg.l_vis * (angle / core::f64::consts::PI)
}

/// Ascending by cost; the farther-from-robot candidate wins a tie.
pub fn rank_candidates(candidates: &mut [Vec3], p_rob: Vec3, p_goal: Vec3, cfg: &SampleConfig) {
    candidates.sort_by(|a, b| {
        candidate_cost(*a, p_rob, p_goal, cfg)
            .total_cmp(&candidate_cost(*b, p_rob, p_goal, cfg))
            .then((*b - p_rob).norm().total_cmp(&(*a - p_rob).norm()))
    });
}

/// Per-axis quintic from the full start state to rest at the target.
#[derive(Clone, Debug)]
pub struct MotionPrimitive {
    coeffs: [[f64; 6]; 3],
    pub duration: f64,
}

impl MotionPrimitive {
    /// Time is clamped to the primitive span; past the end it holds the
    /// rest endpoint.
    pub fn position(&self, t: f64) -> Vec3 {
        let t = t.clamp(0.0, self.duration);
        let mut out = [0.0; 3];
        for (axis, c) in self.coeffs.iter().enumerate() {
            out[axis] = c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * (c[4] + t * c[5]))));
        }
        Vec3::new(out[0], out[1], out[2])
    }

    pub fn velocity(&self, t: f64) -> Vec3 {
        if t > self.duration {
            return Vec3::ZERO;
        }
        let t = t.max(0.0);
        let mut out = [0.0; 3];
        for (axis, c) in self.coeffs.iter().enumerate() {
            out[axis] =
                c[1] + t * (2.0 * c[2] + t * (3.0 * c[3] + t * (4.0 * c[4] + t * 5.0 * c[5])));
        }
        Vec3::new(out[0], out[1], out[2])
    }

    pub fn acceleration(&self, t: f64) -> Vec3 {
        if t > self.duration {
            return Vec3::ZERO;
        }
        let t = t.max(0.0);
        let mut out = [0.0; 3];
        for (axis, c) in self.coeffs.iter().enumerate() {
            out[axis] = 2.0 * c[2] + t * (6.0 * c[3] + t * (12.0 * c[4] + t * 20.0 * c[5]));
        }
        Vec3::new(out[0], out[1], out[2])
    }

    pub fn end_position(&self) -> Vec3 {
        self.position(self.duration)
    }

    /// Number of lattice setpoints after the start sample.
    pub fn setpoint_count(&self, dt: f64) -> usize {
        (self.duration / dt + 1e-9) as usize
    }
}

/// Flight time heuristic: twice the straight-line time, clamped so very
/// short hops still get a real ramp and long ones replan before finishing.
pub fn flight_time(distance: f64, v_max: f64) -> f64 {
    (2.0 * distance / v_max).clamp(0.5, 4.0)
}

pub fn generate_primitive(
    state0: &RobotState,
    p_target: Vec3,
    cfg: &SampleConfig,
) -> MotionPrimitive {
    let t_end = flight_time((p_target - state0.position).norm(), cfg.v_max);
    let mut coeffs = [[0.0; 6]; 3];
    let p0 = [state0.position.x, state0.position.y, state0.position.z];
    let v0 = [state0.velocity.x, state0.velocity.y, state0.velocity.z];
    let a0 = [state0.acceleration.x, state0.acceleration.y, state0.acceleration.z];
    let pt = [p_target.x, p_target.y, p_target.z];
    let t = t_end;
    for axis in 0..3 {
        let dp = pt[axis] - (p0[axis] + v0[axis] * t + 0.5 * a0[axis] * t * t);
        let dv = -(v0[axis] + a0[axis] * t);
        let da = -a0[axis];
        let c = &mut coeffs[axis];
        c[0] = p0[axis];
        c[1] = v0[axis];
        c[2] = 0.5 * a0[axis];
        c[3] = 10.0 * dp / t.powi(3) - 4.0 * dv / t.powi(2) + 0.5 * da / t;
        c[4] = -15.0 * dp / t.powi(4) + 7.0 * dv / t.powi(3) - da / t.powi(2);
        c[5] = 6.0 * dp / t.powi(5) - 3.0 * dv / t.powi(4) + 0.5 * da / t.powi(3);
    }
    MotionPrimitive { coeffs, duration: t_end }
}

/// Shared acceptance rule over a clearance sequence whose first entry is
/// the start sample: each later entry must clear the threshold or be no
/// worse than its predecessor.
pub fn passes_distance_rule(distances: &[f64], d_min: f64) -> bool {
    distances.windows(2).all(|w| w[1] > d_min || w[1] >= w[0])
}

pub fn check_static(prim: &MotionPrimitive, field: &DistanceField, cfg: &CheckConfig) -> bool {
    let n = prim.setpoint_count(cfg.dt);
    let mut prev = field.query(prim.position(0.0));
    for k in 1..=n {
        let d = field.query(prim.position(k as f64 * cfg.dt));
        if !(d > cfg.d_min_static || d >= prev) {
            return false;
        }
        prev = d;
    }
    true
}

/// Squared Mahalanobis clearance from a point to one track predicted
/// `horizon` seconds ahead. The obstacle is a ground cylinder: its center
/// height follows the query point up to the cylinder top, the radius is
/// taken off the separation, and penetration reads as zero clearance.
pub fn mahalanobis_clearance(p: Vec3, track: &TrackedObstacle, horizon: f64) -> f64 {
    let center = track.position() + track.velocity() * horizon;
    let center = Vec3::new(center.x, center.y, p.z.min(track.height));
    let delta = p - center;
    let dist = delta.norm();
    if dist <= track.radius {
        return 0.0;
    }
    let dp = delta * (1.0 - track.radius / dist);
    let var = predicted_position_variance(track, horizon);
    dp.x * dp.x / var[0] + dp.y * dp.y / var[1] + dp.z * dp.z / var[2]
}

pub fn check_dynamic(
    prim: &MotionPrimitive,
    tracks: &[TrackedObstacle],
    cfg: &CheckConfig,
    t_now: Stamp,
) -> bool {
    let n = prim.setpoint_count(cfg.dt);
    for track in tracks {
        let clearance = |k: usize| {
            let t = k as f64 * cfg.dt;
            let horizon = (t_now + t - track.stamp).max(0.0);
            mahalanobis_clearance(prim.position(t), track, horizon)
        };
        let mut prev = clearance(0);
        for k in 1..=n {
            let d = clearance(k);
            if !(d > cfg.d_min_dynamic || d >= prev) {
                return false;
            }
            prev = d;
        }
    }
    true
}

#[derive(Clone, Debug)]
pub enum FlightPlan {
    Primitive(MotionPrimitive),
    Hover,
}

impl FlightPlan {
    pub fn is_hover(&self) -> bool {
        matches!(self, FlightPlan::Hover)
    }
}

/// One replan from the current state: the best-ranked sampled candidate
/// whose primitive passes both checks, or a hover order when none does.
pub fn plan_flight(
    state0: &RobotState,
    p_goal: Vec3,
    field: &DistanceField,
    tracks: &[TrackedObstacle],
    sample_cfg: &SampleConfig,
    check_cfg: &CheckConfig,
    rng: &mut impl Rng,
) -> Result<FlightPlan, DegenerateGoal> {
    let mut candidates = sample_candidates(state0.position, p_goal, sample_cfg, rng)?;
    rank_candidates(&mut candidates, state0.position, p_goal, sample_cfg);
    for &candidate in &candidates {
        let prim = generate_primitive(state0, candidate, sample_cfg);
        if check_static(&prim, field, check_cfg) && check_dynamic(&prim, tracks, check_cfg, state0.stamp)
        {
            return Ok(FlightPlan::Primitive(prim));
        }
    }
    Ok(FlightPlan::Hover)
}
