use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::BaselineParams;
use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::links::FadingMode;
use crate::netstate::{CongestionParams, DelayParams, PathConstraints};
use crate::routing::ProposedParams;
use crate::topology::TopologyParams;

/// Which routing scheme drives an episode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Proposed,
    RsuV2v,
    LaV2v,
    Mrl,
    DrlQos,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Proposed,
        Algorithm::RsuV2v,
        Algorithm::LaV2v,
        Algorithm::Mrl,
        Algorithm::DrlQos,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Proposed => "proposed",
            Algorithm::RsuV2v => "rsu-v2v",
            Algorithm::LaV2v => "la-v2v",
            Algorithm::Mrl => "mrl",
            Algorithm::DrlQos => "drl-qos",
        }
    }

    /// Stable index used to key per-algorithm random streams.
    pub fn index(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown algorithm {s:?}")))
    }
}

/// Full simulation configuration. Every field has a default, so an empty
/// document is a valid configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SimConfig {
    pub topology: TopologyParams,
    pub channel: ChannelParams,
    pub congestion: CongestionParams,
    pub delay: DelayParams,
    pub constraints: PathConstraints,
    pub proposed: ProposedParams,
    pub baselines: BaselineParams,
    pub fading: FadingMode,
    pub slot_s: f64,
    pub n_vehicles: Vec<usize>,
    pub episodes: usize,
    pub max_hops: usize,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            topology: TopologyParams::default(),
            channel: ChannelParams::default(),
            congestion: CongestionParams::default(),
            delay: DelayParams::default(),
            constraints: PathConstraints::default(),
            proposed: ProposedParams::default(),
            baselines: BaselineParams::default(),
            fading: FadingMode::PerSlot,
            slot_s: 0.1,
            n_vehicles: vec![50, 100, 200, 300, 400, 500],
            episodes: 200,
            max_hops: 15,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.topology.validate()?;
        self.channel.validate()?;
        self.congestion.validate()?;
        self.delay.validate()?;
        self.constraints.validate()?;
        self.proposed.validate()?;
        self.baselines.validate()?;
        if !(self.slot_s > 0.0) {
            return Err(Error::InvalidConfig("slot_s must be > 0".into()));
        }
        if self.episodes == 0 {
            return Err(Error::InvalidConfig("episodes must be >= 1".into()));
        }
        if self.max_hops == 0 {
            return Err(Error::InvalidConfig("max_hops must be >= 1".into()));
        }
        if let Some(&n) = self.n_vehicles.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidConfig(format!(
                "n_vehicles entries must be >= 2, got {n}"
            )));
        }
        Ok(())
    }
}
