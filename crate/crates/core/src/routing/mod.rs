//! The adaptive multi-metric routing scheme.
//!
//! A decision runs in four steps: read the congestion level (RSU broadcast or
//! local estimate), pick V2I or V2V mode, screen candidates for connectivity
//! and advancement, then take the lowest-metric candidate as primary and the
//! most stable one as backup, switching to the backup when the primary's
//! metric exceeds the threshold. An empty screen enters recovery, which drops
//! the advancement rule; if that is empty too the packet is carried.

pub mod decision;
pub mod metric;
pub mod screening;

use serde::{Deserialize, Serialize};

pub use decision::{choose, evaluate_candidates, CandidateEval, Choice, RouteDecision};
pub use metric::{
    adapt_threshold, adapt_weights, hop_metric, link_stability, MetricWeights, SwitchState,
    ThresholdPolicy,
};
pub use screening::{
    estimate_local_congestion, observed_congestion, recovery_candidates, screen_candidates,
    select_mode, v2v_candidates, Recovery, Screened, TransmissionMode, Visited,
};

use crate::error::{Error, Result};
use crate::links::LinkEnv;
use crate::netstate::{vehicle_load, CongestionParams};
use crate::topology::{RsuId, VehicleId};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProposedParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta: f64,
    pub c_th: f64,
    pub c_th_min: f64,
    pub c_th_max: f64,
    pub window_decisions: u32,
    pub disruption_hi: u32,
    pub switch_hi: u32,
    pub v_ref_mps: f64,
    pub carry_slots_max: u32,
    /// Adapt weights to congestion and own load.
    pub adaptive_weights: bool,
    /// Adapt the switching threshold from disruption and switch counts.
    pub adaptive_threshold: bool,
    /// When set, a covering RSU is only used if the faded SNR of the
    /// vehicle-to-RSU link reaches this value.
    pub v2i_snr_threshold: Option<f64>,
}

impl Default for ProposedParams {
    fn default() -> Self {
        Self {
            alpha: 0.4,
            beta: 0.2,
            gamma: 0.2,
            delta: 0.2,
            c_th: 1.5,
            c_th_min: 0.5,
            c_th_max: 5.0,
            window_decisions: 20,
            disruption_hi: 3,
            switch_hi: 10,
            v_ref_mps: 30.0,
            carry_slots_max: 10,
            adaptive_weights: true,
            adaptive_threshold: true,
            v2i_snr_threshold: None,
        }
    }
}

impl ProposedParams {
    pub fn validate(&self) -> Result<()> {
        MetricWeights::new(self.alpha, self.beta, self.gamma, self.delta)?;
        if !(self.c_th_min > 0.0 && self.c_th_min <= self.c_th_max) {
            return Err(Error::InvalidConfig(
                "proposed.c_th_min must be > 0 and <= c_th_max".into(),
            ));
        }
        if !(self.c_th_min..=self.c_th_max).contains(&self.c_th) {
            return Err(Error::InvalidConfig(
                "proposed.c_th must lie in [c_th_min, c_th_max]".into(),
            ));
        }
        if self.window_decisions == 0 {
            return Err(Error::InvalidConfig(
                "proposed.window_decisions must be >= 1".into(),
            ));
        }
        if !(self.v_ref_mps > 0.0) {
            return Err(Error::InvalidConfig(
                "proposed.v_ref_mps must be > 0".into(),
            ));
        }
        Ok(())
    }

    pub fn weights(&self) -> Result<MetricWeights> {
        MetricWeights::new(self.alpha, self.beta, self.gamma, self.delta)
    }

    pub fn threshold_policy(&self) -> ThresholdPolicy {
        ThresholdPolicy {
            window: self.window_decisions,
            disruption_hi: self.disruption_hi,
            switch_hi: self.switch_hi,
            ..ThresholdPolicy::default()
        }
    }
}

/// RSUs the source may use for V2I, per the configured detection rule.
pub fn detect_rsus(
    env: &LinkEnv<'_>,
    src: VehicleId,
    snr_threshold: Option<f64>,
) -> Result<Vec<RsuId>> {
    let (_, rsus) = select_mode(env.topo, src)?;
    let Some(threshold) = snr_threshold else {
        return Ok(rsus);
    };
    let mut out = Vec::with_capacity(rsus.len());
    for r in rsus {
        if env.rsu_quality(src, r)?.snr >= threshold {
            out.push(r);
        }
    }
    Ok(out)
}

/// One next-hop decision with explicit state. Never returns an empty
/// `chosen` unless the mode is [`TransmissionMode::Carry`].
#[allow(clippy::too_many_arguments)]
pub fn decide_next_hop(
    env: &LinkEnv<'_>,
    src: VehicleId,
    dst: VehicleId,
    visited: &Visited,
    c_global: f64,
    weights: &MetricWeights,
    c_th: f64,
    params: &ProposedParams,
    q_max: f64,
) -> Result<RouteDecision> {
    if src == dst {
        return Err(Error::ContractViolation("source equals destination".into()));
    }
    let rsus = detect_rsus(env, src, params.v2i_snr_threshold)?;
    let mode = if rsus.is_empty() {
        TransmissionMode::V2V
    } else {
        TransmissionMode::V2I
    };
    let screened = screen_candidates(env.topo, src, dst, mode, &rsus, visited, q_max)?;
    let (mode, candidates) = if screened.candidates.is_empty() {
        match recovery_candidates(env.topo, src, dst, visited, q_max)? {
            Recovery::Candidates(c) => (TransmissionMode::Recovery, c),
            Recovery::Carry => return Ok(RouteDecision::carry(c_global, *weights)),
        }
    } else {
        (screened.mode, screened.candidates)
    };
    let evals = evaluate_candidates(env, src, &candidates, c_global, weights, params.v_ref_mps)?;
    let choice = choose(&evals, c_th).expect("candidate set is non-empty");
    Ok(RouteDecision::from_choice(mode, choice, c_global, *weights))
}

/// Episode-local state of the proposed scheme.
#[derive(Debug, Clone)]
pub struct ProposedRouter {
    params: ProposedParams,
    base_weights: MetricWeights,
    switch: SwitchState,
    policy: ThresholdPolicy,
}

impl ProposedRouter {
    pub fn new(params: &ProposedParams) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            base_weights: params.weights()?,
            switch: SwitchState::new(params.c_th, params.c_th_min, params.c_th_max),
            policy: params.threshold_policy(),
            params: params.clone(),
        })
    }

    pub fn switch_state(&self) -> &SwitchState {
        &self.switch
    }

    pub fn params(&self) -> &ProposedParams {
        &self.params
    }

    pub fn decide(
        &mut self,
        env: &LinkEnv<'_>,
        src: VehicleId,
        dst: VehicleId,
        visited: &Visited,
        congestion: &CongestionParams,
        q_max: f64,
    ) -> Result<RouteDecision> {
        let c_global = observed_congestion(env.topo, src, congestion)?;
        let weights = if self.params.adaptive_weights {
            adapt_weights(
                &self.base_weights,
                c_global,
                vehicle_load(env.topo.vehicle(src)?),
            )
        } else {
            self.base_weights
        };
        let d = decide_next_hop(
            env,
            src,
            dst,
            visited,
            c_global,
            &weights,
            self.switch.c_th,
            &self.params,
            q_max,
        )?;
        if self.params.adaptive_threshold {
            let disrupted = matches!(d.mode, TransmissionMode::Recovery | TransmissionMode::Carry);
            self.switch.record(disrupted, d.switched, &self.policy);
        }
        Ok(d)
    }
}
