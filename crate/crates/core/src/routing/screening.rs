//! Transmission-mode selection and candidate screening. The baselines reuse
//! the same screening code so every algorithm shares one notion of a legal hop.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::netstate::{self, vehicle_load, CongestionParams};
use crate::topology::{distance, RsuId, Topology, VehicleId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransmissionMode {
    V2I,
    V2V,
    Recovery,
    Carry,
}

impl std::fmt::Display for TransmissionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TransmissionMode::V2I => "V2I",
            TransmissionMode::V2V => "V2V",
            TransmissionMode::Recovery => "recovery",
            TransmissionMode::Carry => "carry",
        })
    }
}

/// Vehicles that already held the packet in this episode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Visited(Vec<bool>);

impl Visited {
    pub fn new(n_vehicles: usize) -> Self {
        Self(vec![false; n_vehicles])
    }

    pub fn insert(&mut self, v: VehicleId) {
        self.0[v.index()] = true;
    }

    pub fn contains(&self, v: VehicleId) -> bool {
        self.0.get(v.index()).copied().unwrap_or(false)
    }
}

/// V2I when any RSU covers the source, V2V otherwise.
pub fn select_mode(topo: &Topology, src: VehicleId) -> Result<(TransmissionMode, Vec<RsuId>)> {
    let rsus = topo.reachable_rsus(src)?;
    let mode = if rsus.is_empty() {
        TransmissionMode::V2V
    } else {
        TransmissionMode::V2I
    };
    Ok((mode, rsus))
}

/// Result of normal (non-recovery) screening.
#[derive(Debug, Clone, PartialEq)]
pub struct Screened {
    /// Mode whose screening produced the set; V2I falls through to V2V when empty.
    pub mode: TransmissionMode,
    pub candidates: Vec<VehicleId>,
}

/// Vehicles reachable over one V2V hop that move the packet strictly closer
/// to `dst`, are unvisited, and are not overloaded. `dst` is always admitted
/// when in range.
pub fn v2v_candidates(
    topo: &Topology,
    src: VehicleId,
    dst: VehicleId,
    visited: &Visited,
    q_max: f64,
) -> Result<Vec<VehicleId>> {
    filter_candidates(topo, src, dst, visited, q_max, |_| true)
}

fn filter_candidates(
    topo: &Topology,
    src: VehicleId,
    dst: VehicleId,
    visited: &Visited,
    q_max: f64,
    extra: impl Fn(&crate::topology::VehicleState) -> bool,
) -> Result<Vec<VehicleId>> {
    let ps = topo.position(src)?;
    let pd = topo.position(dst)?;
    let here = distance(ps, pd);
    let r = topo.v2v_radius_m;
    Ok(topo
        .vehicles
        .iter()
        .filter(|w| {
            if w.id == src || visited.contains(w.id) || distance(ps, w.position) > r {
                return false;
            }
            if w.id == dst {
                return true;
            }
            distance(w.position, pd) < here && vehicle_load(w) <= q_max && extra(w)
        })
        .map(|w| w.id)
        .collect())
}

/// Candidates for `mode`. In V2I mode a candidate must also sit inside the
/// coverage of one of `rsus`; an empty V2I set falls through to V2V.
pub fn screen_candidates(
    topo: &Topology,
    src: VehicleId,
    dst: VehicleId,
    mode: TransmissionMode,
    rsus: &[RsuId],
    visited: &Visited,
    q_max: f64,
) -> Result<Screened> {
    if mode == TransmissionMode::V2I && !rsus.is_empty() {
        let covered = filter_candidates(topo, src, dst, visited, q_max, |w| {
            rsus.iter()
                .any(|&r| topo.in_rsu_coverage(w.position, r).unwrap_or(false))
        })?;
        if !covered.is_empty() {
            return Ok(Screened {
                mode: TransmissionMode::V2I,
                candidates: covered,
            });
        }
    }
    Ok(Screened {
        mode: TransmissionMode::V2V,
        candidates: v2v_candidates(topo, src, dst, visited, q_max)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum Recovery {
    Candidates(Vec<VehicleId>),
    Carry,
}

/// Drops the advancement requirement only: any unvisited neighbour within
/// the load cap will do.
pub fn recovery_candidates(
    topo: &Topology,
    src: VehicleId,
    dst: VehicleId,
    visited: &Visited,
    q_max: f64,
) -> Result<Recovery> {
    let mut c = Vec::new();
    for w in topo.v2v_neighbors(src)? {
        if visited.contains(w) {
            continue;
        }
        if w == dst || vehicle_load(topo.vehicle(w)?) <= q_max {
            c.push(w);
        }
    }
    Ok(if c.is_empty() {
        Recovery::Carry
    } else {
        Recovery::Candidates(c)
    })
}

/// Local plug-in estimate of the global congestion level: the neighbour count
/// divided by the count expected at congestion 1 over the same in-region area.
pub fn estimate_local_congestion(
    topo: &Topology,
    src: VehicleId,
    params: &CongestionParams,
) -> Result<f64> {
    let n = topo.v2v_neighbors(src)?.len() as f64;
    if n == 0.0 {
        return Ok(0.0);
    }
    let r = topo.v2v_radius_m;
    let area = topo.region.disc_overlap(topo.position(src)?, r);
    let expected_at_one = area / (PI * r * r) * params.density_divisor.unwrap_or(1.0);
    Ok((n / expected_at_one).min(1.0))
}

/// Congestion level as known to `src`: the RSU broadcast when covered,
/// otherwise the local estimate.
pub fn observed_congestion(
    topo: &Topology,
    src: VehicleId,
    params: &CongestionParams,
) -> Result<f64> {
    if topo.reachable_rsus(src)?.is_empty() {
        estimate_local_congestion(topo, src, params)
    } else {
        Ok(netstate::scaled_global_congestion(
            topo.n_vehicles(),
            topo.v2v_radius_m,
            &topo.region,
            params,
        ))
    }
}
