//! Channel state as seen by a forwarding decision in one time slot.

use serde::{Deserialize, Serialize};

use crate::channel::{self, ChannelParams, FadingSample, LinkQuality};
use crate::error::Result;
use crate::rng::{self, Stream};
use crate::topology::{distance, RsuId, Topology, VehicleId};

/// How fading samples are produced for each link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FadingMode {
    /// Fresh sample per (link, slot).
    #[default]
    PerSlot,
    /// One sample per link for the whole episode.
    Frozen,
    /// No shadowing, unit multipath gain.
    Unit,
}

/// Deterministic fading field keyed by (seed, episode, link, slot). The same
/// link in the same slot always sees the same sample, regardless of which
/// algorithm asks or in which order.
#[derive(Debug, Clone, Copy)]
pub struct FadingField {
    pub seed: u64,
    pub episode: u64,
    pub mode: FadingMode,
}

impl FadingField {
    pub fn new(seed: u64, episode: u64, mode: FadingMode) -> Self {
        Self {
            seed,
            episode,
            mode,
        }
    }

    pub fn sample(
        &self,
        params: &ChannelParams,
        a: VehicleId,
        b: VehicleId,
        slot: u64,
    ) -> FadingSample {
        let (lo, hi) = if a <= b { (a.0, b.0) } else { (b.0, a.0) };
        let slot = match self.mode {
            FadingMode::Unit => return FadingSample::UNIT,
            FadingMode::Frozen => 0,
            FadingMode::PerSlot => slot,
        };
        let mut rng = rng::stream(
            self.seed,
            Stream::Fading,
            &[self.episode, slot, lo as u64, hi as u64],
        );
        channel::sample_fading(params, &mut rng)
    }

    /// Fading of a vehicle-to-RSU link. RSU keys are drawn from the top of the
    /// id space so they never collide with vehicle pairs.
    pub fn sample_rsu(
        &self,
        params: &ChannelParams,
        v: VehicleId,
        rsu: RsuId,
        slot: u64,
    ) -> FadingSample {
        self.sample(params, v, VehicleId(u32::MAX - rsu.0), slot)
    }
}

/// Everything a next-hop decision needs to know about the radio environment.
#[derive(Clone, Copy)]
pub struct LinkEnv<'a> {
    pub topo: &'a Topology,
    pub channel: &'a ChannelParams,
    pub fading: &'a FadingField,
    pub slot: u64,
}

impl<'a> LinkEnv<'a> {
    pub fn quality(&self, a: VehicleId, b: VehicleId) -> Result<LinkQuality> {
        let d = self.topo.vehicle_distance(a, b)?;
        let f = self.fading.sample(self.channel, a, b, self.slot);
        channel::assess_link(self.channel, d.max(f64::MIN_POSITIVE), f)
    }

    pub fn rsu_quality(&self, v: VehicleId, rsu: RsuId) -> Result<LinkQuality> {
        let d = distance(self.topo.position(v)?, self.topo.rsu(rsu)?.position);
        let f = self.fading.sample_rsu(self.channel, v, rsu, self.slot);
        channel::assess_link(self.channel, d.max(f64::MIN_POSITIVE), f)
    }

    /// Shannon rate at the unit-fading calibration point used to normalise
    /// baseline rate terms.
    pub fn reference_rate(&self, reference_dist_m: f64) -> Result<f64> {
        let q = channel::assess_link(self.channel, reference_dist_m, FadingSample::UNIT)?;
        Ok(q.rate_bps)
    }
}
