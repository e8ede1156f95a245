//! Shared fixtures for the routing benchmarks.

use iov_core::sim::EpisodeRunner;
use iov_core::{Result, SimConfig, Topology};

/// Default config with a fixed seed, and the topology it generates for
/// `n_vehicles`.
pub fn fixture(n_vehicles: usize) -> Result<(SimConfig, Topology)> {
    let cfg = SimConfig {
        seed: 7,
        ..SimConfig::default()
    };
    let topo = Topology::generate(n_vehicles, &cfg.topology, cfg.seed)?;
    Ok((cfg, topo))
}

/// Runner over a fixture; panics on a bad fixture since benches cannot recover.
pub fn runner<'a>(cfg: &'a SimConfig, topo: &'a Topology) -> EpisodeRunner<'a> {
    EpisodeRunner::new(cfg, topo).expect("fixture topology is valid")
}
