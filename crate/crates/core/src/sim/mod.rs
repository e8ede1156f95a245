//! Episode runner, density sweep and composite scoring.

pub mod audit;
mod config;
mod episode;
mod sweep;

pub use config::{Algorithm, SimConfig};
pub use episode::{Episode, EpisodeMetrics, EpisodeRunner, HopRecord, Termination, TraceEvent};
pub use sweep::{
    composite_score, metric_tuple, run_point, run_point_on, run_sweep, with_thread_cap, PointRun,
    SweepRow, Tally, THREADS_ENV,
};
