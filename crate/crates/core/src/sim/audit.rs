//! Offline re-validation of delivered episodes with the independent
//! constraint checkers in [`crate::netstate`].

use super::config::SimConfig;
use super::episode::{Episode, TraceEvent};
use crate::error::{Error, Result};
use crate::netstate::{
    check_advancement, check_connectivity, check_delay, check_load, check_reliability, path_delay,
    Violation,
};
use crate::routing::{hop_metric, TransmissionMode};

/// Constraints broken by the recorded path of `ep`. Recovery hops are exempt
/// from the advancement rule, which recovery relaxes by design.
pub fn audit_path(ep: &Episode, cfg: &SimConfig) -> Result<Vec<Violation>> {
    let mut out = Vec::new();
    let hops: Vec<_> = ep.path_hops().collect();
    if hops.len() != ep.path.hop_count() {
        return Err(Error::ContractViolation(
            "trace and path disagree on hop count".into(),
        ));
    }
    let range = cfg.topology.v2v_radius_m;
    if !hops
        .iter()
        .all(|h| check_connectivity(&[h.from_pos, h.to_pos], range))
    {
        out.push(Violation::Connectivity);
    }
    if !hops
        .iter()
        .filter(|h| h.mode != Some(TransmissionMode::Recovery))
        .all(|h| check_advancement(&[h.from_pos, h.to_pos], h.dst_pos))
    {
        out.push(Violation::Advancement);
    }
    if !check_reliability(&ep.path, &cfg.constraints) {
        out.push(Violation::Reliability);
    }
    if !check_load(&ep.path, &cfg.constraints) {
        out.push(Violation::Overload);
    }
    let carried = ep
        .trace
        .iter()
        .filter(|e| matches!(e, TraceEvent::Carry { .. }))
        .count() as f64;
    let delay = path_delay(&ep.path, &cfg.delay, cfg.channel.packet_bits)? + carried * cfg.slot_s;
    if !check_delay(delay, &cfg.constraints) {
        out.push(Violation::Delay);
    }
    Ok(out)
}

/// Sum of the hop metrics the router saw online. `None` if any hop lacks one.
pub fn recorded_cost(ep: &Episode) -> Option<f64> {
    ep.path_hops().map(|h| h.metric).sum()
}

/// Path cost rebuilt from the stored path: per-hop PRR and next-node load come
/// from the path record, congestion, stability and weights from the trace.
pub fn path_cost(ep: &Episode) -> Result<f64> {
    let mut total = 0.0;
    for (i, h) in ep.path_hops().enumerate() {
        let (Some(c), Some(w)) = (h.c_global, h.weights) else {
            return Err(Error::ContractViolation(format!(
                "hop {i} has no metric inputs"
            )));
        };
        total += hop_metric(
            ep.path.per_hop_quality[i].prr,
            ep.path.nodes[i + 1].load,
            c,
            h.stability,
            &w,
        )?;
    }
    Ok(total)
}
