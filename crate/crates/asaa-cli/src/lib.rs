//! File formats and batch execution around the planning core: scenario
//! JSON loading with dotted-path overrides, per-episode metrics and trace
//! artifacts, seed-sweep orchestration, and the aggregate comparison
//! report.

pub mod error;
pub mod overrides;
pub mod report;
pub mod runner;
pub mod scenario_io;
pub mod trace;

pub use error::CliError;
pub use report::{aggregate, AggregateReport, EpisodeRecord, MetricStats, ParadigmStats, Reduction};
pub use runner::{parse_paradigms, parse_seeds, run_sweep, RunSpec};
pub use scenario_io::{load_scenario, LoadedScenario};
pub use trace::write_trace_csv;
