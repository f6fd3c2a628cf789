//! Camera-heading planner. Scores a discrete set of candidate headings
//! against five objectives and returns the cheapest:
//!
//! 1. keep a poorly-observed goal direction inside the field of view,
//! 2. keep a poorly-observed velocity direction inside the view, scaled
//!    by horizontal speed squared,
//! 3. keep tracked obstacles in view, urgency rising with speed over
//!    distance,
//! 4. prefer directions whose sense score is low,
//! 5. resist large swings from the previous plan.
//!
//! Candidates span one bucket past a full turn on each side, matching a
//! mechanically limited mount whose end stops sit beyond that span.

use crate::geometry::{angular_difference, Vec2};
use crate::sud::SudBuffer;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;

const PI: f64 = core::f64::consts::PI;

/// Zero inside the half-width of the view, quadratic growth outside.
/// Continuous at the boundary.
pub fn fov_penalty(theta_bar: f64, fov_width: f64) -> f64 {
    let half = fov_width / 2.0;
    if theta_bar.abs() <= half {
        0.0
    } else {
        theta_bar * theta_bar - half * half
    }
}

#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct PlannerWeights {
    /// Scales of the five objectives, in the order listed above.
    pub lambda: [f64; 5],
    /// Obstacle urgency gain inside objective 3.
    pub beta: f64,
}

impl Default for PlannerWeights {
    fn default() -> Self {
        PlannerWeights {
            lambda: [0.2, 0.9, 1.0, 0.1, 0.4],
            beta: 1.0,
        }
    }
}

/// Mechanical state of the mount. Angles are unwrapped; the travel range
/// must cover the candidate span with margin so planning is never
/// truncated by the end stops.
#[derive(Clone, Copy, Debug)]
pub struct HeadState {
    /// Current mount angle.
    pub angle: f64,
    /// Angle returned by the previous planning step.
    pub prev_plan: f64,
    pub min_angle: f64,
    pub max_angle: f64,
    /// Slew rate cap, rad/s.
    pub max_rate: f64,
}

impl Default for HeadState {
    fn default() -> Self {
        HeadState {
            angle: 0.0,
            prev_plan: 0.0,
            min_angle: -1.25 * PI,
            max_angle: 1.25 * PI,
            max_rate: 1.2,
        }
    }
}

impl HeadState {
    /// One slew step toward `cmd`: bounded rate, then the end stops.
    pub fn rate_limit(&self, cmd: f64, dt: f64) -> f64 {
        debug_assert!(dt >= 0.0);
        let step = (cmd - self.angle).clamp(-self.max_rate * dt, self.max_rate * dt);
        (self.angle + step).clamp(self.min_angle, self.max_angle)
    }
}

/// A tracked obstacle as the planner sees it: bearing, range, speed.
#[derive(Clone, Copy, Debug)]
pub struct ObstacleCue {
    pub direction: f64,
    /// Range, meters. Must be positive.
    pub distance: f64,
    pub speed: f64,
}

pub struct PlanningContext<'a> {
    /// Direction to the goal, if one is set and not directly overhead.
    pub goal_dir: Option<f64>,
    /// Direction of travel; `None` while hovering.
    pub vel_dir: Option<f64>,
    /// Horizontal speed, m/s.
    pub horiz_speed: f64,
    pub obstacles: &'a [ObstacleCue],
    pub sud: &'a SudBuffer,
}

/// The five objective values at a candidate heading `xi`. The obstacle
/// term carries `beta` so the components already have their final form;
/// the caller only applies the lambda scales.
pub fn cost_components(xi: f64, ctx: &PlanningContext, state: &HeadState, beta: f64) -> [f64; 5] {
    let fov = ctx.sud.config().fov_width;
    let penalty_toward = |target: f64| fov_penalty(angular_difference(xi, target), fov);

    let f1 = match ctx.goal_dir {
        Some(dg) => penalty_toward(dg) * (1.0 - ctx.sud.query(dg)),
        None => 0.0,
    };
    let f2 = match ctx.vel_dir {
        Some(dv) => {
            ctx.horiz_speed * ctx.horiz_speed * penalty_toward(dv) * (1.0 - ctx.sud.query(dv))
        }
        None => 0.0,
    };
    let mut f3 = 0.0;
    for ob in ctx.obstacles {
        debug_assert!(ob.distance > 0.0);
        f3 += beta * ob.speed.abs() / ob.distance * penalty_toward(ob.direction);
    }
    let f4 = ctx.sud.query(xi);
    let d5 = xi - state.prev_plan;
    let f5 = d5 * d5;
    [f1, f2, f3, f4, f5]
}

/// Candidate headings: a full turn plus one bucket of overlap per side.
pub fn candidate_headings(bucket_width: f64) -> impl Iterator<Item = f64> {
    let n = (2.0 * PI / bucket_width).round() as usize + 3;
    let start = -(PI + bucket_width);
    (0..n).map(move |k| start + k as f64 * bucket_width)
}

/// Minimizes the weighted objective over the candidate set. Ties resolve
/// to the candidate nearest the current mount angle, then the smallest.
pub fn plan_head(
    ctx: &PlanningContext,
    weights: &PlannerWeights,
    state: &HeadState,
    bucket_width: f64,
) -> f64 {
    let mut best = f64::INFINITY;
    let mut best_xi = state.angle;
    let mut have = false;
    for xi in candidate_headings(bucket_width) {
        let f = cost_components(xi, ctx, state, weights.beta);
        let mut total = 0.0;
        for (w, fi) in weights.lambda.iter().zip(f.iter()) {
            total += w * fi;
        }
        let better = if !have {
            true
        } else if total < best {
            true
        } else if total > best {
            false
        } else {
            let d_new = (xi - state.angle).abs();
            let d_old = (best_xi - state.angle).abs();
            d_new < d_old || (d_new == d_old && xi < best_xi)
        };
        if better {
            best = total;
            best_xi = xi;
            have = true;
        }
    }
    best_xi
}

/// Collects planner obstacle cues from relative positions and velocities.
pub fn obstacle_cues(rel: &[(crate::geometry::Vec3, crate::geometry::Vec3)]) -> Vec<ObstacleCue> {
    let mut cues = Vec::with_capacity(rel.len());
    for (p, v) in rel {
        let dist = p.norm();
        if dist <= f64::EPSILON {
            continue;
        }
        let Some(direction) = crate::geometry::heading_of(Vec2::new(p.x, p.y)) else {
            continue;
        };
        cues.push(ObstacleCue {
            direction,
            distance: dist,
            speed: v.norm(),
        });
    }
    cues
}
