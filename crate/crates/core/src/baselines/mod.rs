//! Comparison algorithms. Each one screens with the shared C1/C2 code in
//! [`crate::routing::screening`] and differs only in how it ranks candidates.

mod drl_qos;
mod mrl;

pub use drl_qos::{drl_qos_next_hop, DrlQosParams, QosTargets};
pub use mrl::{mrl_next_hop, mrl_reward, MrlParams, QTable};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::links::LinkEnv;
use crate::netstate::vehicle_load;
use crate::routing::screening::{screen_candidates, select_mode, v2v_candidates, Visited};
use crate::topology::{distance, VehicleId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StaticScoreWeights {
    pub w_rate: f64,
    pub w_ber: f64,
    pub w_dist: f64,
    pub w_load: f64,
}

impl Default for StaticScoreWeights {
    fn default() -> Self {
        Self {
            w_rate: 1.0,
            w_ber: 1.0,
            w_dist: 1.0,
            w_load: 1.0,
        }
    }
}

impl StaticScoreWeights {
    pub fn validate(&self) -> Result<()> {
        if [self.w_rate, self.w_ber, self.w_dist, self.w_load]
            .iter()
            .any(|w| !(*w >= 0.0))
        {
            return Err(Error::InvalidConfig(
                "baseline score weights must be >= 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BaselineParams {
    pub score: StaticScoreWeights,
    /// Distance at which the unit-fading link rate defines `rate_max`.
    pub rate_ref_dist_m: f64,
    pub mrl: MrlParams,
    pub drl_qos: DrlQosParams,
}

impl Default for BaselineParams {
    fn default() -> Self {
        Self {
            score: StaticScoreWeights::default(),
            rate_ref_dist_m: 100.0,
            mrl: MrlParams::default(),
            drl_qos: DrlQosParams::default(),
        }
    }
}

impl BaselineParams {
    pub fn validate(&self) -> Result<()> {
        self.score.validate()?;
        if !(self.rate_ref_dist_m > 0.0) {
            return Err(Error::InvalidConfig(
                "baselines.rate_ref_dist_m must be > 0".into(),
            ));
        }
        self.mrl.validate()?;
        self.drl_qos.validate()
    }
}

/// Candidate data shared by all baseline scores.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CandidateView {
    pub node: VehicleId,
    /// Rate over `rate_max`, capped at 1.
    pub rate_norm: f64,
    pub ber: f64,
    pub prr: f64,
    /// d(candidate, dst) / d(src, dst).
    pub dist_ratio: f64,
    pub load: f64,
}

pub fn candidate_views(
    env: &LinkEnv<'_>,
    src: VehicleId,
    dst: VehicleId,
    candidates: &[VehicleId],
    rate_max: f64,
) -> Result<Vec<CandidateView>> {
    let pd = env.topo.position(dst)?;
    let here = distance(env.topo.position(src)?, pd);
    candidates
        .iter()
        .map(|&c| {
            let q = env.quality(src, c)?;
            let v = env.topo.vehicle(c)?;
            let dist_ratio = if here > 0.0 {
                distance(v.position, pd) / here
            } else {
                0.0
            };
            Ok(CandidateView {
                node: c,
                rate_norm: (q.rate_bps / rate_max).min(1.0),
                ber: q.ber,
                prr: q.prr,
                dist_ratio,
                load: vehicle_load(v),
            })
        })
        .collect()
}

pub fn static_score(c: &CandidateView, w: &StaticScoreWeights) -> f64 {
    w.w_rate * c.rate_norm - w.w_ber * c.ber - w.w_dist * c.dist_ratio
}

/// Highest score wins; ties go to the lower id.
pub(crate) fn argmax_by_score<T>(
    items: &[T],
    node: impl Fn(&T) -> VehicleId,
    score: impl Fn(&T) -> f64,
) -> Option<VehicleId> {
    items
        .iter()
        .max_by(|a, b| {
            score(a)
                .total_cmp(&score(b))
                .then_with(|| node(b).cmp(&node(a)))
        })
        .map(node)
}

/// RSU-prioritised V2V: RSU-covered candidates when an RSU is in reach,
/// plain V2V otherwise, ranked by the static score.
#[allow(clippy::too_many_arguments)]
pub fn rsu_v2v_next_hop(
    env: &LinkEnv<'_>,
    src: VehicleId,
    dst: VehicleId,
    visited: &Visited,
    w: &StaticScoreWeights,
    rate_max: f64,
    q_max: f64,
) -> Result<Option<VehicleId>> {
    let (mode, rsus) = select_mode(env.topo, src)?;
    let screened = screen_candidates(env.topo, src, dst, mode, &rsus, visited, q_max)?;
    let views = candidate_views(env, src, dst, &screened.candidates, rate_max)?;
    Ok(argmax_by_score(&views, |c| c.node, |c| static_score(c, w)))
}

/// Load-aware V2V: V2V candidates only, static score minus a load penalty.
#[allow(clippy::too_many_arguments)]
pub fn la_v2v_next_hop(
    env: &LinkEnv<'_>,
    src: VehicleId,
    dst: VehicleId,
    visited: &Visited,
    w: &StaticScoreWeights,
    rate_max: f64,
    q_max: f64,
) -> Result<Option<VehicleId>> {
    let candidates = v2v_candidates(env.topo, src, dst, visited, q_max)?;
    let views = candidate_views(env, src, dst, &candidates, rate_max)?;
    Ok(argmax_by_score(
        &views,
        |c| c.node,
        |c| static_score(c, w) - w.w_load * c.load,
    ))
}
