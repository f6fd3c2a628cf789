//! Sense update degree: a per-direction score in [0, 1] over a discretized
//! heading circle, recording how recently and how well each horizontal
//! direction has been observed.
//!
//! Each update combines three terms per bucket:
//! translation along a bucket's direction erodes that bucket's score
//! (scaled by the depth range), vertical translation erodes every bucket,
//! and buckets inside the current field of view gain a hit increment while
//! the rest decay by a miss increment. Scores clamp to [0, 1].

use crate::geometry::{angular_difference, wrap_angle, Stamp, Vec2, Vec3};
use alloc::vec;
use alloc::vec::Vec;
#[cfg(not(feature = "std"))]
use num_traits::Float;

const PI: f64 = core::f64::consts::PI;

pub const SCORE_MIN: f64 = 0.0;
pub const SCORE_MAX: f64 = 1.0;

#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SudConfig {
    /// Bucket width in radians. Must divide the full circle evenly.
    pub bucket_width: f64,
    /// Horizontal field of view of the camera, radians.
    pub fov_width: f64,
    /// Depth range the camera senses reliably, meters.
    pub depth_range: f64,
    /// Erosion gain for translation along a bucket direction.
    pub horiz_gain: f64,
    /// Erosion gain for vertical translation, applied to every bucket.
    pub vert_gain: f64,
    /// Added to buckets inside the field of view.
    pub hit_gain: f64,
    /// Added to buckets outside the field of view (negative).
    pub miss_gain: f64,
}

impl Default for SudConfig {
    fn default() -> Self {
        SudConfig {
            bucket_width: PI / 8.0,
            fov_width: 80.0_f64.to_radians(),
            depth_range: 10.0,
            horiz_gain: 1.0,
            vert_gain: 1.2,
            hit_gain: 0.4,
            miss_gain: -0.05,
        }
    }
}

impl SudConfig {
    pub fn bucket_count(&self) -> usize {
        let n = 2.0 * PI / self.bucket_width;
        let rounded = n.round();
        debug_assert!(
            (n - rounded).abs() < 1e-9 && rounded >= 1.0,
            "bucket width must divide the circle"
        );
        rounded as usize
    }
}

#[derive(Clone, Debug)]
pub struct SudBuffer {
    cfg: SudConfig,
    values: Vec<f64>,
    pub last_update: Stamp,
}

impl SudBuffer {
    /// All-zero buffer: nothing observed yet.
    pub fn new(cfg: SudConfig) -> Self {
        let n = cfg.bucket_count();
        SudBuffer {
            cfg,
            values: vec![0.0; n],
            last_update: 0.0,
        }
    }

    pub fn config(&self) -> &SudConfig {
        &self.cfg
    }

    pub fn bucket_count(&self) -> usize {
        self.values.len()
    }

    /// Direction of bucket `i`, starting at -pi and stepping by the width.
    pub fn bucket_direction(&self, i: usize) -> f64 {
        debug_assert!(i < self.values.len());
        -PI + i as f64 * self.cfg.bucket_width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Seeds every bucket, e.g. to start from a fully-sensed prior.
    pub fn fill(&mut self, v: f64) {
        for slot in self.values.iter_mut() {
            *slot = v.clamp(SCORE_MIN, SCORE_MAX);
        }
    }

    /// Seeds one bucket directly.
    pub fn set_bucket(&mut self, i: usize, v: f64) {
        self.values[i] = v.clamp(SCORE_MIN, SCORE_MAX);
    }

    /// One estimator step. `dp` is the robot displacement since the last
    /// update (world frame), `xi0` the current camera heading.
    pub fn update(&mut self, dp: Vec3, xi0: f64, now: Stamp) {
        let half_fov = self.cfg.fov_width / 2.0;
        for i in 0..self.values.len() {
            let dir = self.bucket_direction(i);
            let along = dp.xy().dot(Vec2::from_heading(dir));
            let fov_term = if angular_difference(dir, xi0).abs() <= half_fov {
                self.cfg.hit_gain
            } else {
                self.cfg.miss_gain
            };
            let increment = -self.cfg.horiz_gain * along / self.cfg.depth_range
                - self.cfg.vert_gain * dp.z.abs()
                + fov_term;
            self.values[i] = (self.values[i] + increment).clamp(SCORE_MIN, SCORE_MAX);
        }
        self.last_update = now;
    }

    /// Score of the bucket nearest to `d` (wrapped first). An exact
    /// midpoint resolves to the lower bucket index.
    pub fn query(&self, d: f64) -> f64 {
        self.values[self.bucket_index(d)]
    }

    pub fn bucket_index(&self, d: f64) -> usize {
        let n = self.values.len();
        let w = wrap_angle(d);
        // w + pi lies in (0, 2*pi], so lo covers {0..n} before the fold.
        let lo = ((w + PI) / self.cfg.bucket_width).floor() as usize % n;
        let hi = (lo + 1) % n;
        let d_lo = angular_difference(w, self.bucket_direction(lo)).abs();
        let d_hi = angular_difference(w, self.bucket_direction(hi)).abs();
        if d_lo < d_hi {
            lo
        } else if d_hi < d_lo {
            hi
        } else {
            lo.min(hi)
        }
    }
}
