//! Per-candidate evaluation and the primary/backup choice.

use serde::{Deserialize, Serialize};

use super::metric::{hop_metric, link_stability, MetricWeights};
use super::screening::TransmissionMode;
use crate::channel::LinkQuality;
use crate::error::Result;
use crate::links::LinkEnv;
use crate::netstate::vehicle_load;
use crate::topology::VehicleId;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CandidateEval {
    pub node: VehicleId,
    pub quality: LinkQuality,
    pub stability: f64,
    pub load: f64,
    pub metric: f64,
}

/// Scores every candidate from `src` with the comprehensive metric.
pub fn evaluate_candidates(
    env: &LinkEnv<'_>,
    src: VehicleId,
    candidates: &[VehicleId],
    c_global: f64,
    weights: &MetricWeights,
    v_ref: f64,
) -> Result<Vec<CandidateEval>> {
    let s = env.topo.vehicle(src)?;
    candidates
        .iter()
        .map(|&c| {
            let w = env.topo.vehicle(c)?;
            let quality = env.quality(src, c)?;
            let v_rel = (s.velocity - w.velocity).norm();
            let d = crate::topology::distance(s.position, w.position);
            let stability = link_stability(v_rel, d, v_ref, env.topo.v2v_radius_m);
            let load = vehicle_load(w);
            let metric = hop_metric(quality.prr, load, c_global, stability, weights)?;
            Ok(CandidateEval {
                node: c,
                quality,
                stability,
                load,
                metric,
            })
        })
        .collect()
}

/// Outcome of the primary/backup selection over a non-empty candidate set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Choice {
    pub primary: CandidateEval,
    pub backup: CandidateEval,
    pub chosen: CandidateEval,
    pub switched: bool,
}

/// Primary is the lowest metric, backup the highest stability, both with
/// ties to the lower id. The backup replaces the primary only when the
/// primary's metric exceeds `c_th` and the two differ.
pub fn choose(evals: &[CandidateEval], c_th: f64) -> Option<Choice> {
    let primary = *evals.iter().min_by(|a, b| {
        a.metric
            .total_cmp(&b.metric)
            .then_with(|| a.node.cmp(&b.node))
    })?;
    let backup = *evals.iter().max_by(|a, b| {
        a.stability
            .total_cmp(&b.stability)
            .then_with(|| b.node.cmp(&a.node))
    })?;
    let switched = primary.metric > c_th && backup.node != primary.node;
    Some(Choice {
        primary,
        backup,
        chosen: if switched { backup } else { primary },
        switched,
    })
}

/// A next-hop decision of the proposed scheme.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RouteDecision {
    pub mode: TransmissionMode,
    pub primary: Option<VehicleId>,
    pub backup: Option<VehicleId>,
    pub chosen: Option<VehicleId>,
    pub primary_metric: f64,
    pub backup_stability: f64,
    pub switched: bool,
    pub c_global: f64,
    pub weights: MetricWeights,
    /// Evaluation of the chosen node.
    pub chosen_eval: Option<CandidateEval>,
}

impl RouteDecision {
    pub fn carry(c_global: f64, weights: MetricWeights) -> Self {
        Self {
            mode: TransmissionMode::Carry,
            primary: None,
            backup: None,
            chosen: None,
            primary_metric: f64::NAN,
            backup_stability: f64::NAN,
            switched: false,
            c_global,
            weights,
            chosen_eval: None,
        }
    }

    pub fn from_choice(
        mode: TransmissionMode,
        choice: Choice,
        c_global: f64,
        weights: MetricWeights,
    ) -> Self {
        Self {
            mode,
            primary: Some(choice.primary.node),
            backup: Some(choice.backup.node),
            chosen: Some(choice.chosen.node),
            primary_metric: choice.primary.metric,
            backup_stability: choice.backup.stability,
            switched: choice.switched,
            c_global,
            weights,
            chosen_eval: Some(choice.chosen),
        }
    }
}
