use std::collections::HashMap;

use rand::seq::IndexedRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{argmax_by_score, candidate_views, CandidateView};
use crate::error::{Error, Result};
use crate::links::LinkEnv;
use crate::routing::screening::{v2v_candidates, Visited};
use crate::topology::VehicleId;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MrlParams {
    pub learning_rate: f64,
    pub discount: f64,
    pub epsilon: f64,
    /// Weight of the immediate reward against the stored Q-value.
    pub mix_eta: f64,
}

impl Default for MrlParams {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            discount: 0.9,
            epsilon: 0.1,
            mix_eta: 0.5,
        }
    }
}

impl MrlParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("learning_rate", self.learning_rate),
            ("discount", self.discount),
            ("epsilon", self.epsilon),
            ("mix_eta", self.mix_eta),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!(
                    "baselines.mrl.{name} must lie in [0, 1]"
                )));
            }
        }
        Ok(())
    }
}

/// Q-values keyed by (node, neighbour); unseen pairs read as 0.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QTable {
    values: HashMap<(VehicleId, VehicleId), f64>,
}

impl QTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, node: VehicleId, neighbour: VehicleId) -> f64 {
        self.values.get(&(node, neighbour)).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, node: VehicleId, neighbour: VehicleId, value: f64) {
        self.values.insert((node, neighbour), value);
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Immediate reward: normalised rate minus BER minus relative distance left.
pub fn mrl_reward(c: &CandidateView) -> f64 {
    c.rate_norm - c.ber - c.dist_ratio
}

/// Epsilon-greedy choice over `eta * reward + (1 - eta) * Q`, followed by a
/// one-step Q update of the chosen pair.
#[allow(clippy::too_many_arguments)]
pub fn mrl_next_hop<R: Rng + ?Sized>(
    q: &mut QTable,
    env: &LinkEnv<'_>,
    src: VehicleId,
    dst: VehicleId,
    visited: &Visited,
    params: &MrlParams,
    rate_max: f64,
    q_max: f64,
    rng: &mut R,
) -> Result<Option<VehicleId>> {
    let candidates = v2v_candidates(env.topo, src, dst, visited, q_max)?;
    if candidates.is_empty() {
        return Ok(None);
    }
    let views = candidate_views(env, src, dst, &candidates, rate_max)?;
    let eta = params.mix_eta;
    let chosen = if rng.random_bool(params.epsilon) {
        views.choose(rng).expect("non-empty").node
    } else {
        argmax_by_score(
            &views,
            |c| c.node,
            |c| eta * mrl_reward(c) + (1.0 - eta) * q.get(src, c.node),
        )
        .expect("non-empty")
    };
    let reward = mrl_reward(
        views
            .iter()
            .find(|c| c.node == chosen)
            .expect("chosen in views"),
    );
    let future = if chosen == dst {
        0.0
    } else {
        let mut ahead = visited.clone();
        ahead.insert(chosen);
        v2v_candidates(env.topo, chosen, dst, &ahead, q_max)?
            .into_iter()
            .map(|n| q.get(chosen, n))
            .fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))))
            .unwrap_or(0.0)
    };
    let old = q.get(src, chosen);
    let lr = params.learning_rate;
    q.set(
        src,
        chosen,
        (1.0 - lr) * old + lr * (reward + params.discount * future),
    );
    Ok(Some(chosen))
}
