//! Node load, global congestion, per-hop and end-to-end delay, path reliability,
//! and the path constraint checks used to audit delivered routes.

use std::collections::HashSet;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::channel::LinkQuality;
use crate::error::{Error, Result};
use crate::topology::{RoadRegion, RsuId, Topology, VehicleId, VehicleState};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CongestionParams {
    pub decay_per_slot: f64,
    pub load_per_packet: f64,
    /// Optional divisor applied to the global congestion ratio before clamping.
    pub density_divisor: Option<f64>,
}

impl Default for CongestionParams {
    fn default() -> Self {
        Self {
            decay_per_slot: 0.05,
            load_per_packet: 1.0,
            density_divisor: None,
        }
    }
}

impl CongestionParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.decay_per_slot) {
            return Err(Error::InvalidConfig(
                "congestion.decay_per_slot must lie in [0, 1)".into(),
            ));
        }
        if !(self.load_per_packet > 0.0) {
            return Err(Error::InvalidConfig(
                "congestion.load_per_packet must be > 0".into(),
            ));
        }
        if let Some(d) = self.density_divisor {
            if !(d > 0.0) {
                return Err(Error::InvalidConfig(
                    "congestion.density_divisor must be > 0".into(),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DelayParams {
    pub tau0_s: f64,
    pub k_rsu: f64,
    pub tau_rsu_s: f64,
}

impl Default for DelayParams {
    fn default() -> Self {
        Self {
            tau0_s: 0.05,
            k_rsu: 1.0,
            tau_rsu_s: 0.001,
        }
    }
}

impl DelayParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("tau0_s", self.tau0_s),
            ("k_rsu", self.k_rsu),
            ("tau_rsu_s", self.tau_rsu_s),
        ] {
            if !(v > 0.0) {
                return Err(Error::InvalidConfig(format!("delay.{name} must be > 0")));
            }
        }
        Ok(())
    }
}

/// A node on a path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NodeRef {
    Vehicle(VehicleId),
    Rsu(RsuId),
}

/// One node of a recorded path together with the congestion state it had when
/// it held the packet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathNode {
    pub node: NodeRef,
    /// Normalised queue load (vehicles).
    pub load: f64,
    /// Active incoming links (RSUs).
    pub in_degree: u32,
}

impl PathNode {
    pub fn vehicle(id: VehicleId, load: f64) -> Self {
        Self {
            node: NodeRef::Vehicle(id),
            load,
            in_degree: 0,
        }
    }

    pub fn rsu(id: RsuId, in_degree: u32) -> Self {
        Self {
            node: NodeRef::Rsu(id),
            load: 0.0,
            in_degree,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PathRecord {
    pub nodes: Vec<PathNode>,
    pub per_hop_quality: Vec<LinkQuality>,
}

impl PathRecord {
    pub fn new(nodes: Vec<PathNode>, per_hop_quality: Vec<LinkQuality>) -> Result<Self> {
        let p = Self {
            nodes,
            per_hop_quality,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::ContractViolation("path has no nodes".into()));
        }
        if self.per_hop_quality.len() + 1 != self.nodes.len() {
            return Err(Error::ContractViolation(format!(
                "path has {} nodes but {} hop qualities",
                self.nodes.len(),
                self.per_hop_quality.len()
            )));
        }
        let mut seen = HashSet::new();
        for n in &self.nodes {
            if !seen.insert(n.node) {
                return Err(Error::ContractViolation(format!(
                    "path revisits {:?}",
                    n.node
                )));
            }
        }
        Ok(())
    }

    pub fn hop_count(&self) -> usize {
        self.per_hop_quality.len()
    }

    /// Snapshot loads and in-degrees for `nodes` from a topology.
    pub fn from_topology(
        topo: &Topology,
        nodes: &[NodeRef],
        per_hop_quality: Vec<LinkQuality>,
    ) -> Result<Self> {
        let nodes = nodes
            .iter()
            .map(|&n| match n {
                NodeRef::Vehicle(v) => {
                    let s = topo.vehicle(v)?;
                    Ok(PathNode::vehicle(v, node_load(s.queue_len, s.buffer_cap)?))
                }
                NodeRef::Rsu(r) => Ok(PathNode::rsu(r, topo.rsu(r)?.in_degree)),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(nodes, per_hop_quality)
    }
}

pub fn node_load(queue_len: f64, buffer_cap: f64) -> Result<f64> {
    if !(buffer_cap > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "buffer capacity must be > 0, got {buffer_cap}"
        )));
    }
    Ok((queue_len.max(0.0) / buffer_cap).min(1.0))
}

pub fn vehicle_load(v: &VehicleState) -> f64 {
    node_load(v.queue_len, v.buffer_cap).unwrap_or(1.0)
}

/// Coverage-overlap congestion, min(1, N * pi * R_v^2 / area).
pub fn global_congestion(n_vehicles: usize, r_v: f64, region: &RoadRegion) -> f64 {
    (n_vehicles as f64 * PI * r_v * r_v / region.area()).min(1.0)
}

/// [`global_congestion`] with the optional density divisor applied.
pub fn scaled_global_congestion(
    n_vehicles: usize,
    r_v: f64,
    region: &RoadRegion,
    params: &CongestionParams,
) -> f64 {
    let raw = n_vehicles as f64 * PI * r_v * r_v / region.area();
    (raw / params.density_divisor.unwrap_or(1.0)).min(1.0)
}

pub fn update_load_on_forward(v: &VehicleState, params: &CongestionParams) -> VehicleState {
    let mut out = v.clone();
    out.queue_len = (v.queue_len + params.load_per_packet).min(v.buffer_cap);
    out
}

pub fn decay_loads(topo: &mut Topology, params: &CongestionParams) {
    let keep = 1.0 - params.decay_per_slot;
    for v in &mut topo.vehicles {
        v.queue_len *= keep;
    }
}

pub fn tx_delay(packet_bits: f64, rate_bps: f64) -> Result<f64> {
    if !(rate_bps > 0.0) {
        return Err(Error::DeadLink(rate_bps));
    }
    Ok(packet_bits / rate_bps)
}

pub fn vehicle_queue_delay(load: f64, params: &DelayParams) -> f64 {
    params.tau0_s * load
}

pub fn rsu_queue_delay(in_degree: u32, params: &DelayParams) -> f64 {
    params.k_rsu * in_degree as f64 * params.tau_rsu_s
}

/// Transmission delay over every hop plus queueing at each relay. The source
/// and the destination contribute no queueing term; propagation is neglected.
pub fn path_delay(path: &PathRecord, params: &DelayParams, packet_bits: f64) -> Result<f64> {
    path.validate()?;
    let mut total = 0.0;
    for q in &path.per_hop_quality {
        total += tx_delay(packet_bits, q.rate_bps)?;
    }
    let k = path.nodes.len();
    if k > 2 {
        for n in &path.nodes[1..k - 1] {
            total += match n.node {
                NodeRef::Vehicle(_) => vehicle_queue_delay(n.load, params),
                NodeRef::Rsu(_) => rsu_queue_delay(n.in_degree, params),
            };
        }
    }
    Ok(total)
}

/// End-to-end delivery probability, the product of per-hop PRR.
pub fn path_pdr(path: &PathRecord) -> f64 {
    path.per_hop_quality.iter().map(|q| q.prr).product()
}

/// Thresholds on whole paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PathConstraints {
    pub pdr_min: f64,
    pub t_max_s: f64,
    pub q_max: f64,
}

impl Default for PathConstraints {
    fn default() -> Self {
        Self {
            pdr_min: 0.7,
            t_max_s: 10.0,
            q_max: 0.95,
        }
    }
}

impl PathConstraints {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.pdr_min) {
            return Err(Error::InvalidConfig(
                "constraints.pdr_min must lie in [0, 1]".into(),
            ));
        }
        if !(self.t_max_s > 0.0) {
            return Err(Error::InvalidConfig(
                "constraints.t_max_s must be > 0".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.q_max) {
            return Err(Error::InvalidConfig(
                "constraints.q_max must lie in [0, 1]".into(),
            ));
        }
        Ok(())
    }
}

/// Which path constraint a route breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Violation {
    /// A hop is longer than the radio range.
    Connectivity,
    /// A hop does not move strictly closer to the destination.
    Advancement,
    /// Product of PRR below the minimum.
    Reliability,
    /// A relay was overloaded.
    Overload,
    /// End-to-end delay above the maximum.
    Delay,
}

/// Hop-length check: every consecutive pair of positions within `range`.
pub fn check_connectivity(positions: &[crate::topology::Vec2], range: f64) -> bool {
    positions
        .windows(2)
        .all(|w| crate::topology::distance(w[0], w[1]) <= range)
}

/// Every hop strictly closer to `dst` than its predecessor.
pub fn check_advancement(positions: &[crate::topology::Vec2], dst: crate::topology::Vec2) -> bool {
    positions
        .windows(2)
        .all(|w| crate::topology::distance(w[1], dst) < crate::topology::distance(w[0], dst))
}

pub fn check_reliability(path: &PathRecord, c: &PathConstraints) -> bool {
    path_pdr(path) >= c.pdr_min
}

/// Every intermediate relay at or below `q_max`; the endpoints are exempt.
pub fn check_load(path: &PathRecord, c: &PathConstraints) -> bool {
    let k = path.nodes.len();
    k < 3 || path.nodes[1..k - 1].iter().all(|n| n.load <= c.q_max)
}

pub fn check_delay(delay_s: f64, c: &PathConstraints) -> bool {
    delay_s <= c.t_max_s
}
