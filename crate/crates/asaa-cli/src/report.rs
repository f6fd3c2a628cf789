//! Sweep aggregation: per-paradigm statistics of every episode metric and
//! pairwise reduction ratios between paradigms, reduced in sorted
//! (paradigm, seed) order so the report is independent of execution
//! interleaving.

use std::collections::BTreeMap;
use std::io::Write;

use asaa_core::sim::{CallCounts, EpisodeMetrics};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// One episode's artifact, as stored in its metrics JSON file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub scenario: String,
    pub paradigm: String,
    pub seed: u64,
    pub metrics: EpisodeMetrics,
    pub counts: CallCounts,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricStats {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
}

fn stats(values: &[f64]) -> MetricStats {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    MetricStats { mean, std: var.sqrt() }
}

fn optional_stats(values: &[f64]) -> Option<MetricStats> {
    if values.is_empty() {
        None
    } else {
        Some(stats(values))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParadigmStats {
    pub episodes: u32,
    pub collisions_moving: MetricStats,
    pub collisions_hovering: MetricStats,
    pub avg_speed: MetricStats,
    pub goal_events: MetricStats,
    /// Pooled over every reached goal of every episode; absent when no
    /// goal was reached.
    pub time_to_goal: Option<MetricStats>,
    /// Over episodes that saw a dynamic obstacle.
    pub min_clearance: Option<MetricStats>,
    pub elapsed: MetricStats,
}

/// `reduction` is the fractional drop of the candidate's mean relative to
/// the baseline's: (baseline − candidate) / baseline. Emitted only when
/// the baseline mean is positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub metric: String,
    pub baseline: String,
    pub candidate: String,
    pub reduction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub scenario: String,
    pub seeds: Vec<u64>,
    pub paradigms: BTreeMap<String, ParadigmStats>,
    pub reductions: Vec<Reduction>,
}

const REDUCED_METRICS: [&str; 3] = ["collisions_moving", "collisions_hovering", "avg_speed"];

fn metric_mean(stats: &ParadigmStats, metric: &str) -> f64 {
    match metric {
        "collisions_moving" => stats.collisions_moving.mean,
        "collisions_hovering" => stats.collisions_hovering.mean,
        "avg_speed" => stats.avg_speed.mean,
        _ => unreachable!("unlisted metric"),
    }
}

pub fn aggregate(scenario: &str, records: &[EpisodeRecord]) -> AggregateReport {
    let mut sorted: Vec<&EpisodeRecord> = records.iter().collect();
    sorted.sort_by(|a, b| (a.paradigm.as_str(), a.seed).cmp(&(b.paradigm.as_str(), b.seed)));

    let mut seeds: Vec<u64> = sorted.iter().map(|r| r.seed).collect();
    seeds.sort_unstable();
    seeds.dedup();

    let mut by_paradigm: BTreeMap<String, Vec<&EpisodeRecord>> = BTreeMap::new();
    for rec in &sorted {
        by_paradigm.entry(rec.paradigm.clone()).or_default().push(rec);
    }

    let mut paradigms = BTreeMap::new();
    for (name, recs) in &by_paradigm {
        let pull = |f: &dyn Fn(&EpisodeMetrics) -> f64| -> Vec<f64> {
            recs.iter().map(|r| f(&r.metrics)).collect()
        };
        let times: Vec<f64> = recs
            .iter()
            .flat_map(|r| r.metrics.time_to_goals.iter().copied())
            .collect();
        let clearances: Vec<f64> = recs.iter().filter_map(|r| r.metrics.min_clearance).collect();
        paradigms.insert(
            name.clone(),
            ParadigmStats {
                episodes: recs.len() as u32,
                collisions_moving: stats(&pull(&|m| f64::from(m.collisions_moving))),
                collisions_hovering: stats(&pull(&|m| f64::from(m.collisions_hovering))),
                avg_speed: stats(&pull(&|m| m.avg_speed)),
                goal_events: stats(&pull(&|m| f64::from(m.goal_events))),
                time_to_goal: optional_stats(&times),
                min_clearance: optional_stats(&clearances),
                elapsed: stats(&pull(&|m| m.elapsed)),
            },
        );
    }

    let mut reductions = Vec::new();
    for metric in REDUCED_METRICS {
        for (base_name, base) in &paradigms {
            let base_mean = metric_mean(base, metric);
            if base_mean <= 0.0 {
                continue;
            }
            for (cand_name, cand) in &paradigms {
                if cand_name == base_name {
                    continue;
                }
                reductions.push(Reduction {
                    metric: metric.to_string(),
                    baseline: base_name.clone(),
                    candidate: cand_name.clone(),
                    reduction: (base_mean - metric_mean(cand, metric)) / base_mean,
                });
            }
        }
    }

    AggregateReport { scenario: scenario.to_string(), seeds, paradigms, reductions }
}

/// Bar-chart-shaped table: one row per paradigm, mean/std column pairs.
pub fn write_aggregate_csv<W: Write>(writer: W, report: &AggregateReport) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record([
        "paradigm",
        "episodes",
        "collisions_moving_mean",
        "collisions_moving_std",
        "collisions_hovering_mean",
        "collisions_hovering_std",
        "avg_speed_mean",
        "avg_speed_std",
        "goal_events_mean",
        "goal_events_std",
        "time_to_goal_mean",
        "time_to_goal_std",
        "min_clearance_mean",
        "min_clearance_std",
        "elapsed_mean",
        "elapsed_std",
    ])?;
    let opt = |s: &Option<MetricStats>, f: &dyn Fn(&MetricStats) -> f64| -> String {
        s.as_ref().map_or(String::new(), |s| format!("{}", f(s)))
    };
    for (name, s) in &report.paradigms {
        w.write_record([
            name.clone(),
            s.episodes.to_string(),
            format!("{}", s.collisions_moving.mean),
            format!("{}", s.collisions_moving.std),
            format!("{}", s.collisions_hovering.mean),
            format!("{}", s.collisions_hovering.std),
            format!("{}", s.avg_speed.mean),
            format!("{}", s.avg_speed.std),
            format!("{}", s.goal_events.mean),
            format!("{}", s.goal_events.std),
            opt(&s.time_to_goal, &|s| s.mean),
            opt(&s.time_to_goal, &|s| s.std),
            opt(&s.min_clearance, &|s| s.mean),
            opt(&s.min_clearance, &|s| s.std),
            format!("{}", s.elapsed.mean),
            format!("{}", s.elapsed.std),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(paradigm: &str, seed: u64, moving: u32, speed: f64) -> EpisodeRecord {
        EpisodeRecord {
            scenario: "t".into(),
            paradigm: paradigm.into(),
            seed,
            metrics: EpisodeMetrics {
                collisions_moving: moving,
                collisions_hovering: 0,
                avg_speed: speed,
                goal_events: 1,
                time_to_goals: vec![10.0],
                min_clearance: None,
                elapsed: 30.0,
            },
            counts: CallCounts::default(),
        }
    }

    #[test]
    fn means_and_stds_match_hand_arithmetic() {
        let recs = vec![
            record("a", 0, 2, 0.8),
            record("a", 1, 4, 1.0),
            record("b", 0, 6, 0.9),
            record("b", 1, 6, 0.9),
        ];
        let rep = aggregate("t", &recs);
        let a = &rep.paradigms["a"];
        assert_eq!(a.collisions_moving.mean, 3.0);
        assert_eq!(a.collisions_moving.std, 1.0);
        assert!((a.avg_speed.mean - 0.9).abs() < 1e-15);
        let b = &rep.paradigms["b"];
        assert_eq!(b.collisions_moving.std, 0.0);
    }

    #[test]
    fn reductions_use_the_baseline_mean() {
        let recs = vec![record("a", 0, 1, 1.0), record("b", 0, 4, 1.0)];
        let rep = aggregate("t", &recs);
        let r = rep
            .reductions
            .iter()
            .find(|r| r.metric == "collisions_moving" && r.baseline == "b" && r.candidate == "a")
            .unwrap();
        assert_eq!(r.reduction, 0.75);
        // Baseline a has mean 1 > 0 so the reverse pair exists too, negative.
        let rev = rep
            .reductions
            .iter()
            .find(|r| r.metric == "collisions_moving" && r.baseline == "a")
            .unwrap();
        assert_eq!(rev.reduction, -3.0);
    }

    #[test]
    fn aggregation_ignores_input_order() {
        let mut recs = vec![
            record("a", 0, 2, 0.8),
            record("a", 1, 4, 1.0),
            record("b", 0, 6, 0.9),
        ];
        let rep1 = aggregate("t", &recs);
        recs.reverse();
        let rep2 = aggregate("t", &recs);
        assert_eq!(rep1, rep2);
    }

    #[test]
    fn single_episode_aggregate_equals_the_episode() {
        let rec = record("a", 7, 3, 0.7);
        let rep = aggregate("t", &[rec.clone()]);
        let a = &rep.paradigms["a"];
        assert_eq!(a.collisions_moving.mean, 3.0);
        assert_eq!(a.collisions_moving.std, 0.0);
        assert_eq!(a.avg_speed.mean, 0.7);
        assert_eq!(a.time_to_goal.unwrap().mean, 10.0);
        assert_eq!(rep.seeds, vec![7]);
    }
}
