use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{argmax_by_score, candidate_views};
use crate::error::{Error, Result};
use crate::links::LinkEnv;
use crate::routing::metric::link_stability;
use crate::routing::screening::{v2v_candidates, Visited};
use crate::topology::VehicleId;

/// Target values and deviation weights for the state
/// (interruption probability, load, normalised rate, BER).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QosTargets {
    pub targets: [f64; 4],
    pub weights: [f64; 4],
}

impl Default for QosTargets {
    fn default() -> Self {
        Self {
            targets: [0.0, 0.0, 1.0, 0.0],
            weights: [1.0; 4],
        }
    }
}

impl QosTargets {
    pub fn reward(&self, state: [f64; 4]) -> f64 {
        let dev: f64 = state
            .iter()
            .zip(&self.targets)
            .zip(&self.weights)
            .map(|((s, t), w)| w * (s - t).abs())
            .sum();
        (-dev).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DrlQosParams {
    pub qos: QosTargets,
    pub epsilon: f64,
    pub w_dist: f64,
    pub v_ref_mps: f64,
}

impl Default for DrlQosParams {
    fn default() -> Self {
        Self {
            qos: QosTargets::default(),
            epsilon: 0.1,
            w_dist: 1.0,
            v_ref_mps: 30.0,
        }
    }
}

impl DrlQosParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::InvalidConfig(
                "baselines.drl_qos.epsilon must lie in [0, 1]".into(),
            ));
        }
        if self.qos.weights.iter().any(|w| !(*w >= 0.0)) || !(self.w_dist >= 0.0) {
            return Err(Error::InvalidConfig(
                "baselines.drl_qos weights must be >= 0".into(),
            ));
        }
        if !(self.v_ref_mps > 0.0) {
            return Err(Error::InvalidConfig(
                "baselines.drl_qos.v_ref_mps must be > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Epsilon-greedy over `reward - w_dist * d(cand, dst) / d(src, dst)`, where
/// the reward is exp(-weighted deviation of the QoS state from its targets).
#[allow(clippy::too_many_arguments)]
pub fn drl_qos_next_hop<R: Rng + ?Sized>(
    env: &LinkEnv<'_>,
    src: VehicleId,
    dst: VehicleId,
    visited: &Visited,
    params: &DrlQosParams,
    rate_max: f64,
    q_max: f64,
    rng: &mut R,
) -> Result<Option<VehicleId>> {
    let candidates = v2v_candidates(env.topo, src, dst, visited, q_max)?;
    if candidates.is_empty() {
        return Ok(None);
    }
    let views = candidate_views(env, src, dst, &candidates, rate_max)?;
    if rng.random_bool(params.epsilon) {
        return Ok(views.choose(rng).map(|c| c.node));
    }
    let s = env.topo.vehicle(src)?;
    let scored = views
        .iter()
        .map(|c| {
            let w = env.topo.vehicle(c.node)?;
            let v_rel = (s.velocity - w.velocity).norm();
            let d = crate::topology::distance(s.position, w.position);
            let p_int = 1.0 - link_stability(v_rel, d, params.v_ref_mps, env.topo.v2v_radius_m);
            let reward = params.qos.reward([p_int, c.load, c.rate_norm, c.ber]);
            Ok((c.node, reward - params.w_dist * c.dist_ratio))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(argmax_by_score(&scored, |x| x.0, |x| x.1))
}
