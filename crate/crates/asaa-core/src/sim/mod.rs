//! Deterministic kinematic test world. A robot follows the planned
//! primitives, scripted obstacles walk their paths, and a delayed
//! field-of-view camera feeds the full perception stack. Four observation
//! paradigms share the tracker and the flight planner and differ only in
//! who aims the camera and the fuselage.

mod episode;
mod paradigm;
mod scenario;
mod sensor;

pub use episode::{run_episode, CallCounts, EpisodeMetrics, EpisodeOutput, TraceRow, TrackSnapshot};
pub use paradigm::{route_paradigm, AimCommand, Paradigm, UnknownParadigm, ALL_PARADIGMS};
pub use scenario::{
    Bounds, Goal, GoalScript, MovingObstacle, PathMode, RespawnRule, Scenario, StaticShape,
    Trigger,
};
pub use sensor::{capture_frame, CaptureState, DynamicHit, Frame, ObstacleState, StaticHit};
