use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::config::{Algorithm, SimConfig};
use crate::baselines::{drl_qos_next_hop, la_v2v_next_hop, mrl_next_hop, rsu_v2v_next_hop, QTable};
use crate::channel::LinkQuality;
use crate::error::{Error, Result};
use crate::links::{FadingField, LinkEnv};
use crate::netstate::{
    decay_loads, tx_delay, update_load_on_forward, vehicle_load, vehicle_queue_delay, PathNode,
    PathRecord,
};
use crate::rng::{self, Stream};
use crate::routing::{
    link_stability, MetricWeights, ProposedRouter, RouteDecision, TransmissionMode, Visited,
};
use crate::topology::{distance, Topology, Vec2, VehicleId};

/// Why an episode ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Termination {
    Delivered,
    /// The Bernoulli draw for a hop failed.
    LinkFailure,
    /// The decision returned no next hop.
    NoRoute,
    /// The packet was carried for the maximum number of slots without a hop.
    CarryExhausted,
    HopLimit,
    DelayExceeded,
    PdrBelowMin,
}

impl Termination {
    pub fn is_interruption(self) -> bool {
        matches!(self, Termination::NoRoute | Termination::CarryExhausted)
    }

    /// Ended by a path constraint guard rather than by the channel or routing.
    pub fn is_aborted(self) -> bool {
        matches!(
            self,
            Termination::HopLimit | Termination::DelayExceeded | Termination::PdrBelowMin
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpisodeMetrics {
    pub src: VehicleId,
    pub dst: VehicleId,
    pub termination: Termination,
    pub delivered: bool,
    pub interruptions: u32,
    pub switches: u32,
    /// Successful hops.
    pub hops: usize,
    /// Transmission attempts, including a failed final one.
    pub attempted_hops: usize,
    pub ber_sum: f64,
    /// Elapsed simulated time: hop delays plus time spent carrying.
    pub e2e_delay_s: f64,
    pub delivered_bits: f64,
    /// Simulated time the episode was active, equal to `e2e_delay_s`.
    pub active_time_s: f64,
}

impl EpisodeMetrics {
    pub fn mean_hop_ber(&self) -> Option<f64> {
        (self.attempted_hops > 0).then(|| self.ber_sum / self.attempted_hops as f64)
    }
}

/// One transmission attempt.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HopRecord {
    pub slot: u64,
    pub from: VehicleId,
    pub to: VehicleId,
    /// Set for the proposed scheme only.
    pub mode: Option<TransmissionMode>,
    pub primary: Option<VehicleId>,
    pub backup: Option<VehicleId>,
    pub switched: bool,
    /// Hop metric of the chosen node (proposed scheme only).
    pub metric: Option<f64>,
    pub c_global: Option<f64>,
    pub weights: Option<MetricWeights>,
    pub c_th: Option<f64>,
    pub stability: f64,
    pub quality: LinkQuality,
    /// Load of the receiving node when the decision was made.
    pub next_load: f64,
    pub from_pos: Vec2,
    pub to_pos: Vec2,
    pub dst_pos: Vec2,
    pub delay_s: f64,
    pub success: bool,
}

// Hops dominate every trace, so boxing them would only add allocations.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TraceEvent {
    Hop(HopRecord),
    Carry { slot: u64, at: VehicleId },
}

#[derive(Debug, Clone)]
pub struct Episode {
    pub metrics: EpisodeMetrics,
    /// Successfully traversed path, starting at the source.
    pub path: PathRecord,
    pub trace: Vec<TraceEvent>,
}

impl Episode {
    /// Hop records of successful transmissions, aligned with `path` hops.
    pub fn path_hops(&self) -> impl Iterator<Item = &HopRecord> {
        self.trace.iter().filter_map(|e| match e {
            TraceEvent::Hop(h) if h.success => Some(h),
            _ => None,
        })
    }
}

struct Step {
    next: Option<VehicleId>,
    decision: Option<RouteDecision>,
    c_th: Option<f64>,
}

/// Runs episodes of one algorithm on one initial topology snapshot.
pub struct EpisodeRunner<'a> {
    cfg: &'a SimConfig,
    snapshot: &'a Topology,
    fading_seed: u64,
    rate_max: f64,
}

impl<'a> EpisodeRunner<'a> {
    pub fn new(cfg: &'a SimConfig, snapshot: &'a Topology) -> Result<Self> {
        if snapshot.n_vehicles() < 2 {
            return Err(Error::InvalidConfig(
                "an episode needs at least 2 vehicles".into(),
            ));
        }
        let n = snapshot.n_vehicles() as u64;
        let rate_max = crate::channel::assess_link(
            &cfg.channel,
            cfg.baselines.rate_ref_dist_m,
            crate::channel::FadingSample::UNIT,
        )?
        .rate_bps;
        Ok(Self {
            cfg,
            snapshot,
            fading_seed: rng::derive_seed(cfg.seed, Stream::Fading, &[n]),
            rate_max,
        })
    }

    fn stream(&self, s: Stream, episode: u64, extra: &[u64]) -> ChaCha8Rng {
        let mut idx = vec![self.snapshot.n_vehicles() as u64, episode];
        idx.extend_from_slice(extra);
        rng::stream(self.cfg.seed, s, &idx)
    }

    /// Source and destination of an episode; identical for every algorithm.
    pub fn endpoints(&self, episode: u64) -> (VehicleId, VehicleId) {
        let n = self.snapshot.n_vehicles() as u32;
        let mut r = self.stream(Stream::Endpoints, episode, &[]);
        let src = r.random_range(0..n);
        let mut dst = r.random_range(0..n - 1);
        if dst >= src {
            dst += 1;
        }
        (VehicleId(src), VehicleId(dst))
    }

    pub fn run(&self, algorithm: Algorithm, episode: u64, q: &mut QTable) -> Result<Episode> {
        let (src, dst) = self.endpoints(episode);
        self.run_between(algorithm, episode, src, dst, q)
    }

    pub fn run_between(
        &self,
        algorithm: Algorithm,
        episode: u64,
        src: VehicleId,
        dst: VehicleId,
        q: &mut QTable,
    ) -> Result<Episode> {
        if src == dst {
            return Err(Error::ContractViolation("source equals destination".into()));
        }
        let cfg = self.cfg;
        let mut topo = self.snapshot.clone();
        let fading = FadingField::new(self.fading_seed, episode, cfg.fading);
        let mut hop_rng = self.stream(Stream::HopSuccess, episode, &[]);
        let mut explore = self.stream(Stream::Exploration, episode, &[algorithm.index()]);
        let mut proposed = match algorithm {
            Algorithm::Proposed => Some(ProposedRouter::new(&cfg.proposed)?),
            _ => None,
        };

        let mut visited = Visited::new(topo.n_vehicles());
        visited.insert(src);
        let mut nodes = vec![PathNode::vehicle(src, vehicle_load(topo.vehicle(src)?))];
        let mut qualities = Vec::new();
        let mut trace = Vec::new();

        let mut m = EpisodeMetrics {
            src,
            dst,
            termination: Termination::NoRoute,
            delivered: false,
            interruptions: 0,
            switches: 0,
            hops: 0,
            attempted_hops: 0,
            ber_sum: 0.0,
            e2e_delay_s: 0.0,
            delivered_bits: 0.0,
            active_time_s: 0.0,
        };
        let mut cur = src;
        let mut slot = 0u64;
        let mut carried = 0u32;
        let mut running_pdr = 1.0;

        let termination = loop {
            if m.hops >= cfg.max_hops {
                break Termination::HopLimit;
            }
            let env = LinkEnv {
                topo: &topo,
                channel: &cfg.channel,
                fading: &fading,
                slot,
            };
            let step = self.decide(
                algorithm,
                proposed.as_mut(),
                &env,
                cur,
                dst,
                &visited,
                q,
                &mut explore,
            )?;
            let Some(next) = step.next else {
                let can_carry = proposed.is_some();
                if can_carry && carried < cfg.proposed.carry_slots_max {
                    carried += 1;
                    trace.push(TraceEvent::Carry { slot, at: cur });
                    m.e2e_delay_s += cfg.slot_s;
                    advance(&mut topo, cfg);
                    slot += 1;
                    if m.e2e_delay_s > cfg.constraints.t_max_s {
                        break Termination::DelayExceeded;
                    }
                    continue;
                }
                m.interruptions += 1;
                break if can_carry {
                    Termination::CarryExhausted
                } else {
                    Termination::NoRoute
                };
            };
            carried = 0;

            let quality = env.quality(cur, next)?;
            let from = topo.vehicle(cur)?;
            let to = topo.vehicle(next)?;
            let next_load = vehicle_load(to);
            let (stability, metric) = match step.decision.as_ref().and_then(|d| d.chosen_eval) {
                Some(e) => (e.stability, Some(e.metric)),
                None => (
                    link_stability(
                        (from.velocity - to.velocity).norm(),
                        distance(from.position, to.position),
                        cfg.proposed.v_ref_mps,
                        topo.v2v_radius_m,
                    ),
                    None,
                ),
            };
            let mut delay = tx_delay(cfg.channel.packet_bits, quality.rate_bps)?;
            if next != dst {
                delay += vehicle_queue_delay(next_load, &cfg.delay);
            }
            let success = hop_rng.random::<f64>() < quality.prr;
            let switched = step.decision.as_ref().is_some_and(|d| d.switched);
            m.switches += switched as u32;
            m.attempted_hops += 1;
            m.ber_sum += quality.ber;
            m.e2e_delay_s += delay;
            trace.push(TraceEvent::Hop(HopRecord {
                slot,
                from: cur,
                to: next,
                mode: step.decision.as_ref().map(|d| d.mode),
                primary: step.decision.as_ref().and_then(|d| d.primary),
                backup: step.decision.as_ref().and_then(|d| d.backup),
                switched,
                metric,
                c_global: step.decision.as_ref().map(|d| d.c_global),
                weights: step.decision.as_ref().map(|d| d.weights),
                c_th: step.c_th,
                stability,
                quality,
                next_load,
                from_pos: from.position,
                to_pos: to.position,
                dst_pos: topo.position(dst)?,
                delay_s: delay,
                success,
            }));
            let updated = update_load_on_forward(topo.vehicle(cur)?, &cfg.congestion);
            *topo.vehicle_mut(cur)? = updated;
            if !success {
                break Termination::LinkFailure;
            }

            m.hops += 1;
            running_pdr *= quality.prr;
            nodes.push(PathNode::vehicle(next, next_load));
            qualities.push(quality);
            visited.insert(next);
            cur = next;
            advance(&mut topo, cfg);
            slot += 1;

            if running_pdr < cfg.constraints.pdr_min {
                break Termination::PdrBelowMin;
            }
            if m.e2e_delay_s > cfg.constraints.t_max_s {
                break Termination::DelayExceeded;
            }
            if cur == dst {
                break Termination::Delivered;
            }
        };

        m.termination = termination;
        m.delivered = termination == Termination::Delivered;
        m.active_time_s = m.e2e_delay_s;
        if m.delivered {
            m.delivered_bits = cfg.channel.packet_bits;
        }
        Ok(Episode {
            metrics: m,
            path: PathRecord::new(nodes, qualities)?,
            trace,
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn decide(
        &self,
        algorithm: Algorithm,
        proposed: Option<&mut ProposedRouter>,
        env: &LinkEnv<'_>,
        cur: VehicleId,
        dst: VehicleId,
        visited: &Visited,
        q: &mut QTable,
        explore: &mut ChaCha8Rng,
    ) -> Result<Step> {
        let cfg = self.cfg;
        let q_max = cfg.constraints.q_max;
        let bl = &cfg.baselines;
        let plain = |next| Step {
            next,
            decision: None,
            c_th: None,
        };
        Ok(match algorithm {
            Algorithm::Proposed => {
                let router = proposed.expect("proposed router present");
                let c_th = router.switch_state().c_th;
                let d = router.decide(env, cur, dst, visited, &cfg.congestion, q_max)?;
                Step {
                    next: d.chosen,
                    decision: Some(d),
                    c_th: Some(c_th),
                }
            }
            Algorithm::RsuV2v => plain(rsu_v2v_next_hop(
                env,
                cur,
                dst,
                visited,
                &bl.score,
                self.rate_max,
                q_max,
            )?),
            Algorithm::LaV2v => plain(la_v2v_next_hop(
                env,
                cur,
                dst,
                visited,
                &bl.score,
                self.rate_max,
                q_max,
            )?),
            Algorithm::Mrl => plain(mrl_next_hop(
                q,
                env,
                cur,
                dst,
                visited,
                &bl.mrl,
                self.rate_max,
                q_max,
                explore,
            )?),
            Algorithm::DrlQos => plain(drl_qos_next_hop(
                env,
                cur,
                dst,
                visited,
                &bl.drl_qos,
                self.rate_max,
                q_max,
                explore,
            )?),
        })
    }
}

fn advance(topo: &mut Topology, cfg: &SimConfig) {
    topo.step_mobility(cfg.slot_s);
    decay_loads(topo, &cfg.congestion);
}
