//! Queue-based synchronization of asynchronous sensor streams.
//!
//! Camera frames arrive late by a known pipeline delay, so their stamps
//! are corrected first; pose and camera-angle samples wait in stamped
//! queues and are matched to a corrected stamp by nearest-neighbor
//! selection or linear interpolation. Lookups advance the queue head but
//! keep the bracketing pair, so a later lookup at a later target stays
//! answerable.

use crate::geometry::{Stamp, Vec3};
use alloc::collections::VecDeque;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SyncError {
    /// Push with a stamp at or before the newest entry.
    OutOfOrder,
    /// Lookup on an empty queue.
    NoData,
    /// Interpolation target outside the retained stamp span.
    ExtrapolationRefused,
    /// Stamp correction would move before time zero.
    NegativeStamp,
}

impl core::fmt::Display for SyncError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let msg = match self {
            SyncError::OutOfOrder => "stamp not after the newest queue entry",
            SyncError::NoData => "queue is empty",
            SyncError::ExtrapolationRefused => "target outside the retained span",
            SyncError::NegativeStamp => "corrected stamp is negative",
        };
        f.write_str(msg)
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SyncError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SyncMode {
    Nearest,
    Interpolate,
}

#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SyncConfig {
    /// Image pipeline delay taken off every frame stamp, s.
    pub t_delay: f64,
    pub mode: SyncMode,
}

impl Default for SyncConfig {
    fn default() -> Self {
        Self { t_delay: 0.18, mode: SyncMode::Nearest }
    }
}

/// Frame stamps record arrival; subtracting the pipeline delay recovers
/// capture time.
pub fn corrected_stamp(t_image: Stamp, cfg: &SyncConfig) -> Result<Stamp, SyncError> {
    let t = t_image - cfg.t_delay;
    if t < 0.0 {
        return Err(SyncError::NegativeStamp);
    }
    Ok(t)
}

/// Componentwise blend at weight `w` in [0, 1] from `a` toward `b`.
pub trait Lerp {
    fn lerp(a: &Self, b: &Self, w: f64) -> Self;
}

impl Lerp for f64 {
    fn lerp(a: &Self, b: &Self, w: f64) -> Self {
        a + (b - a) * w
    }
}

impl Lerp for Vec3 {
    fn lerp(a: &Self, b: &Self, w: f64) -> Self {
        *a + (*b - *a) * w
    }
}

#[derive(Clone, Debug)]
pub struct StampedQueue<V> {
    entries: VecDeque<(Stamp, V)>,
    capacity: usize,
}

impl<V> Default for StampedQueue<V> {
    fn default() -> Self {
        Self::new(256)
    }
}

impl<V> StampedQueue<V> {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0);
        Self { entries: VecDeque::with_capacity(capacity), capacity }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn first_stamp(&self) -> Option<Stamp> {
        self.entries.front().map(|e| e.0)
    }

    pub fn last_stamp(&self) -> Option<Stamp> {
        self.entries.back().map(|e| e.0)
    }

    pub fn entries(&self) -> impl Iterator<Item = (Stamp, &V)> {
        self.entries.iter().map(|(s, v)| (*s, v))
    }

    pub fn push(&mut self, stamp: Stamp, value: V) -> Result<(), SyncError> {
        if let Some((last, _)) = self.entries.back() {
            if stamp <= *last {
                return Err(SyncError::OutOfOrder);
            }
        }
        if self.entries.len() == self.capacity {
            self.entries.pop_front();
        }
        self.entries.push_back((stamp, value));
        Ok(())
    }

    /// Drops entries that can no longer bracket `target`, leaving the
    /// newest entry at or before it in front.
    fn advance_to(&mut self, target: Stamp) {
        while self.entries.len() >= 2 && self.entries[1].0 <= target {
            self.entries.pop_front();
        }
    }
}

impl<V: Clone + Lerp> StampedQueue<V> {
    pub fn lookup(&mut self, target: Stamp, mode: SyncMode) -> Result<V, SyncError> {
        if self.entries.is_empty() {
            return Err(SyncError::NoData);
        }
        self.advance_to(target);
        let (s0, v0) = &self.entries[0];
        match mode {
            SyncMode::Nearest => {
                if *s0 > target {
                    return Ok(v0.clone());
                }
                match self.entries.get(1) {
                    // The earlier entry wins an exact tie.
                    Some((s1, v1)) if s1 - target < target - s0 => Ok(v1.clone()),
                    _ => Ok(v0.clone()),
                }
            }
            SyncMode::Interpolate => {
                if *s0 > target {
                    return Err(SyncError::ExtrapolationRefused);
                }
                if *s0 == target {
                    return Ok(v0.clone());
                }
                let Some((s1, v1)) = self.entries.get(1) else {
                    return Err(SyncError::ExtrapolationRefused);
                };
                let w = (target - s0) / (s1 - s0);
                Ok(Lerp::lerp(v0, v1, w))
            }
        }
    }
}

/// Queue lookup at a corrected stamp under the configured mode.
pub fn sync_lookup<V: Clone + Lerp>(
    q: &mut StampedQueue<V>,
    target: Stamp,
    cfg: &SyncConfig,
) -> Result<V, SyncError> {
    q.lookup(target, cfg.mode)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn push_appends_and_rejects_non_monotone() {
        let mut q = StampedQueue::new(8);
        assert_eq!(q.push(0.0, 1.0), Ok(()));
        assert_eq!(q.len(), 1);
        assert_eq!(q.push(0.0, 2.0), Err(SyncError::OutOfOrder), "equal stamp");
        assert_eq!(q.push(-0.1, 2.0), Err(SyncError::OutOfOrder), "earlier stamp");
        assert_eq!(q.push(0.1, 2.0), Ok(()));
        assert_eq!(q.len(), 2);
    }

    #[test]
    fn capacity_evicts_the_oldest() {
        let mut q = StampedQueue::new(4);
        for k in 0..6 {
            q.push(k as f64, k as f64).unwrap();
        }
        assert_eq!(q.len(), 4);
        assert_eq!(q.first_stamp(), Some(2.0));
        assert_eq!(q.last_stamp(), Some(5.0));
    }

    #[test]
    fn stamp_correction() {
        let cfg = SyncConfig { t_delay: 0.18, mode: SyncMode::Nearest };
        assert!((corrected_stamp(1.0, &cfg).unwrap() - 0.82).abs() < 1e-12);
        let zero = SyncConfig { t_delay: 0.0, mode: SyncMode::Nearest };
        assert_eq!(corrected_stamp(0.37, &zero), Ok(0.37));
        let big = SyncConfig { t_delay: 0.2, mode: SyncMode::Nearest };
        assert_eq!(corrected_stamp(0.1, &big), Err(SyncError::NegativeStamp));
    }

    #[test]
    fn nearest_picks_the_closer_entry() {
        let mut q = StampedQueue::new(8);
        q.push(0.0, 10.0).unwrap();
        q.push(0.1, 20.0).unwrap();
        assert_eq!(q.lookup(0.04, SyncMode::Nearest), Ok(10.0));
        assert_eq!(q.lookup(0.06, SyncMode::Nearest), Ok(20.0));
    }

    #[test]
    fn nearest_tie_takes_the_earlier_entry() {
        let mut q = StampedQueue::new(8);
        q.push(0.0, 10.0).unwrap();
        q.push(0.1, 20.0).unwrap();
        assert_eq!(q.lookup(0.05, SyncMode::Nearest), Ok(10.0));
    }

    #[test]
    fn nearest_clamps_to_the_ends() {
        let mut q = StampedQueue::new(8);
        q.push(0.2, 1.0).unwrap();
        q.push(0.3, 2.0).unwrap();
        assert_eq!(q.lookup(0.05, SyncMode::Nearest), Ok(1.0), "before the first entry");
        assert_eq!(q.lookup(0.9, SyncMode::Nearest), Ok(2.0), "past the last entry");
    }

    #[test]
    fn lookup_on_empty_is_no_data() {
        let mut q: StampedQueue<f64> = StampedQueue::new(8);
        assert_eq!(q.lookup(0.0, SyncMode::Nearest), Err(SyncError::NoData));
        assert_eq!(q.lookup(0.0, SyncMode::Interpolate), Err(SyncError::NoData));
    }

    #[test]
    fn interpolation_blends_the_bracketing_pair() {
        let mut q = StampedQueue::new(8);
        q.push(0.0, 0.0).unwrap();
        q.push(0.1, 1.0).unwrap();
        assert_eq!(q.lookup(0.05, SyncMode::Interpolate), Ok(0.5));
        assert_eq!(q.lookup(0.0, SyncMode::Interpolate), Ok(0.0), "exact hit at the head");
        assert_eq!(q.lookup(0.1, SyncMode::Interpolate), Ok(1.0), "exact hit at the tail");
    }

    #[test]
    fn interpolation_refuses_extrapolation() {
        let mut q = StampedQueue::new(8);
        q.push(0.1, 1.0).unwrap();
        q.push(0.2, 2.0).unwrap();
        assert_eq!(q.lookup(0.05, SyncMode::Interpolate), Err(SyncError::ExtrapolationRefused));
        assert_eq!(q.lookup(0.25, SyncMode::Interpolate), Err(SyncError::ExtrapolationRefused));
    }

    #[test]
    fn increasing_lookups_keep_their_bracket() {
        let mut q = StampedQueue::new(8);
        for k in 0..5 {
            q.push(k as f64 * 0.1, k as f64).unwrap();
        }
        assert!((q.lookup(0.12, SyncMode::Interpolate).unwrap() - 1.2).abs() < 1e-12);
        assert!((q.lookup(0.15, SyncMode::Interpolate).unwrap() - 1.5).abs() < 1e-12);
        assert!((q.lookup(0.38, SyncMode::Interpolate).unwrap() - 3.8).abs() < 1e-12);
    }

    #[test]
    fn linear_signals_interpolate_exactly() {
        let mut q = StampedQueue::new(64);
        let f = |t: f64| Vec3::new(2.0 * t - 1.0, -0.5 * t, 3.0 + t);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let mut t = 0.0;
        for _ in 0..40 {
            t += rng.gen_range(0.01..0.05);
            q.push(t, f(t)).unwrap();
        }
        let mut target = 0.1;
        while target < t {
            if target >= q.first_stamp().unwrap() {
                let got = q.lookup(target, SyncMode::Interpolate).unwrap();
                assert!((got - f(target)).norm() < 1e-9);
            }
            target += 0.037;
        }
    }

    #[test]
    fn nearest_matches_a_full_scan_over_the_retained_window() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let mut q = StampedQueue::new(32);
            let mut t = 0.0;
            for _ in 0..rng.gen_range(1..30) {
                t += rng.gen_range(0.001..0.1);
                q.push(t, t).unwrap();
            }
            let mut target = 0.0;
            for _ in 0..10 {
                target += rng.gen_range(0.0..0.2);
                let scan = q
                    .entries()
                    .map(|(s, _)| s)
                    .min_by(|a, b| {
                        (a - target)
                            .abs()
                            .partial_cmp(&(b - target).abs())
                            .unwrap()
                            .then(a.partial_cmp(b).unwrap())
                    })
                    .unwrap();
                let got = q.lookup(target, SyncMode::Nearest).unwrap();
                assert_eq!(got, scan, "target {target}");
            }
        }
    }

    #[test]
    fn stream_rate_sync_gaps_stay_under_half_a_period() {
        let mut pose = StampedQueue::new(256);
        let mut angle = StampedQueue::new(256);
        for k in 0..200 {
            pose.push(k as f64 * 0.01, k as f64 * 0.01).unwrap();
        }
        for k in 0..100 {
            angle.push(k as f64 * 0.02, k as f64 * 0.02).unwrap();
        }
        let cfg = SyncConfig::default();
        for k in 1..40 {
            let t_arrival = 0.2 + k as f64 / 30.0;
            let t = corrected_stamp(t_arrival, &cfg).unwrap();
            let p = sync_lookup(&mut pose, t, &cfg).unwrap();
            let a = sync_lookup(&mut angle, t, &cfg).unwrap();
            assert!((p - t).abs() <= 0.005 + 1e-12, "pose gap {}", (p - t).abs());
            assert!((a - t).abs() <= 0.010 + 1e-12, "angle gap {}", (a - t).abs());
        }
    }
}
