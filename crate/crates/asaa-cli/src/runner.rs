//! Sweep execution: the (paradigm, seed) grid runs in a worker pool,
//! each episode writing its own artifacts, then a deterministic
//! aggregation pass reduces the records in sorted order.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use asaa_core::sim::{run_episode, Paradigm, Scenario};
use rayon::prelude::*;

use crate::error::CliError;
use crate::report::{aggregate, write_aggregate_csv, AggregateReport, EpisodeRecord};
use crate::trace::write_trace_csv;

#[derive(Clone, Debug)]
pub struct RunSpec {
    pub scenario_path: PathBuf,
    pub paradigms: Vec<Paradigm>,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    pub trace: bool,
    /// Raw `KEY=VALUE` assignments applied to the scenario document.
    pub overrides: Vec<String>,
}

/// `N` means seeds 0..N; a comma form lists them explicitly (a trailing
/// comma makes a single explicit seed: `7,`).
pub fn parse_seeds(arg: &str) -> Result<Vec<u64>, CliError> {
    let bad = |why: &str| CliError::Validation(format!("--seeds {arg}: {why}"));
    let seeds = if arg.contains(',') {
        arg.split(',')
            .filter(|s| !s.is_empty())
            .map(|s| s.trim().parse::<u64>().map_err(|_| bad("not an integer")))
            .collect::<Result<Vec<u64>, CliError>>()?
    } else {
        let n: u64 = arg.trim().parse().map_err(|_| bad("not an integer"))?;
        (0..n).collect()
    };
    if seeds.is_empty() {
        return Err(bad("at least one seed required"));
    }
    Ok(seeds)
}

pub fn parse_paradigms(arg: &str) -> Result<Vec<Paradigm>, CliError> {
    let list = arg
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| Paradigm::from_str(s.trim()))
        .collect::<Result<Vec<Paradigm>, _>>()?;
    if list.is_empty() {
        return Err(CliError::Validation(format!(
            "--paradigm {arg}: at least one paradigm required"
        )));
    }
    Ok(list)
}

pub fn episode_basename(paradigm: Paradigm, seed: u64) -> String {
    format!("episode_{}_{seed:04}", paradigm.name())
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| {
        CliError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

/// Runs every (paradigm, seed) episode of the grid, writes one metrics
/// JSON (and optionally one trace CSV) per episode plus the aggregate
/// JSON and CSV, and returns the aggregate.
pub fn run_sweep(spec: &RunSpec, scenario: &Scenario) -> Result<AggregateReport, CliError> {
    if spec.paradigms.is_empty() || spec.seeds.is_empty() {
        return Err(CliError::Validation(
            "at least one paradigm and one seed required".into(),
        ));
    }
    fs::create_dir_all(&spec.out_dir)?;

    let mut grid: Vec<(Paradigm, u64)> = Vec::new();
    for &p in &spec.paradigms {
        for &s in &spec.seeds {
            grid.push((p, s));
        }
    }

    let records: Vec<EpisodeRecord> = grid
        .par_iter()
        .map(|&(paradigm, seed)| -> Result<EpisodeRecord, CliError> {
            let output = run_episode(scenario, paradigm, seed, spec.trace);
            let record = EpisodeRecord {
                scenario: scenario.name.clone(),
                paradigm: paradigm.name().to_string(),
                seed,
                metrics: output.metrics,
                counts: output.counts,
            };
            let base = spec.out_dir.join(episode_basename(paradigm, seed));
            let json = serde_json::to_string_pretty(&record)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            write_atomic(&base.with_extension("metrics.json"), format!("{json}\n").as_bytes())?;
            if spec.trace {
                let mut buf = Vec::new();
                write_trace_csv(&mut buf, &output.trace)?;
                write_atomic(&base.with_extension("trace.csv"), &buf)?;
            }
            Ok(record)
        })
        .collect::<Result<Vec<EpisodeRecord>, CliError>>()?;

    let report = aggregate(&scenario.name, &records);
    let json =
        serde_json::to_string_pretty(&report).map_err(|e| CliError::Internal(e.to_string()))?;
    write_atomic(&spec.out_dir.join("aggregate.json"), format!("{json}\n").as_bytes())?;
    let mut buf = Vec::new();
    write_aggregate_csv(&mut buf, &report)?;
    write_atomic(&spec.out_dir.join("aggregate.csv"), &buf)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_argument_accepts_count_and_list_forms() {
        assert_eq!(parse_seeds("3").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_seeds("4,7,9").unwrap(), vec![4, 7, 9]);
        assert_eq!(parse_seeds("7,").unwrap(), vec![7]);
        assert!(parse_seeds("0").is_err());
        assert!(parse_seeds("x").is_err());
        assert!(parse_seeds("1,x").is_err());
    }

    #[test]
    fn paradigm_argument_accepts_lists_and_rejects_unknowns() {
        assert_eq!(
            parse_paradigms("asaa_rotatable,velocity_yaw").unwrap(),
            vec![Paradigm::AsaaRotatable, Paradigm::VelocityYaw]
        );
        let e = parse_paradigms("warp_drive").unwrap_err();
        assert_eq!(e.exit_code(), 5);
    }

    #[test]
    fn episode_files_are_named_by_paradigm_and_seed() {
        assert_eq!(
            episode_basename(Paradigm::MultiObjYaw, 12),
            "episode_multiobj_yaw_0012"
        );
    }
}
