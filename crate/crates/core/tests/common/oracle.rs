//! Exhaustive path search on small static instances.
//!
//! Vehicles stand still and fading is frozen, so every link has one fixed
//! quality and every hop metric depends only on its two endpoints. The best
//! path under the five path constraints can then be found by enumeration.

use iov_core::baselines::QTable;
use iov_core::links::{FadingField, FadingMode, LinkEnv};
use iov_core::netstate::{
    check_advancement, check_connectivity, check_delay, check_reliability, path_delay, PathNode,
    PathRecord,
};
use iov_core::rng::{derive_seed, Stream};
use iov_core::routing::{adapt_weights, hop_metric, link_stability, observed_congestion};
use iov_core::sim::{audit, EpisodeRunner};
use iov_core::topology::{distance, RsuState, VehicleState};
use iov_core::{Algorithm, LinkQuality, SimConfig, Topology, Vec2, VehicleId};
use rand::Rng;

use super::rng;

pub struct SmallInstance {
    pub cfg: SimConfig,
    pub topo: Topology,
    pub src: VehicleId,
    pub dst: VehicleId,
    pub episode: u64,
}

/// 3 to 8 parked vehicles on a 1.2 km road, with or without RSUs.
pub fn small_instance(seed: u64) -> SmallInstance {
    let mut r = rng(seed);
    let cfg = SimConfig {
        seed: r.random(),
        fading: FadingMode::Frozen,
        topology: iov_core::TopologyParams {
            road_length_m: 1200.0,
            ..Default::default()
        },
        ..SimConfig::default()
    };
    let n = r.random_range(3..=8usize);
    let region = cfg.topology.region().unwrap();
    let vehicles = (0..n)
        .map(|i| VehicleState {
            id: VehicleId(i as u32),
            position: Vec2::new(
                r.random_range(0.0..region.length_m),
                r.random_range(0.0..region.width_m),
            ),
            velocity: Vec2::new(0.0, 0.0),
            queue_len: 0.0,
            buffer_cap: cfg.topology.buffer_cap,
        })
        .collect();
    let rsus = if r.random_bool(0.5) {
        (0..5)
            .map(|k| RsuState {
                id: iov_core::RsuId(k),
                position: Vec2::new((k as f64 + 0.5) * 240.0, 100.0),
                coverage_m: cfg.topology.rsu_coverage_m,
                in_degree: 0,
            })
            .collect()
    } else {
        Vec::new()
    };
    let topo = Topology::from_parts(region, vehicles, rsus, cfg.topology.v2v_radius_m);
    let src = VehicleId(0);
    let dst = VehicleId(n as u32 - 1);
    SmallInstance {
        cfg,
        topo,
        src,
        dst,
        episode: r.random_range(0..1000),
    }
}

impl SmallInstance {
    fn fading(&self) -> FadingField {
        let n = self.topo.n_vehicles() as u64;
        FadingField::new(
            derive_seed(self.cfg.seed, Stream::Fading, &[n]),
            self.episode,
            FadingMode::Frozen,
        )
    }

    pub fn quality(&self, i: VehicleId, j: VehicleId) -> LinkQuality {
        let fading = self.fading();
        let env = LinkEnv {
            topo: &self.topo,
            channel: &self.cfg.channel,
            fading: &fading,
            slot: 0,
        };
        env.quality(i, j).unwrap()
    }

    /// Hop metric of i -> j as the forwarding node i would compute it.
    pub fn edge_metric(&self, i: VehicleId, j: VehicleId) -> f64 {
        let p = &self.cfg.proposed;
        let c = observed_congestion(&self.topo, i, &self.cfg.congestion).unwrap();
        let w = adapt_weights(&p.weights().unwrap(), c, 0.0);
        let s = link_stability(
            0.0,
            self.topo.vehicle_distance(i, j).unwrap(),
            p.v_ref_mps,
            self.topo.v2v_radius_m,
        );
        hop_metric(self.quality(i, j).prr, 0.0, c, s, &w).unwrap()
    }

    fn pos(&self, v: VehicleId) -> Vec2 {
        self.topo.position(v).unwrap()
    }

    /// Full constraint check of a candidate path, built only from netstate's
    /// checkers.
    pub fn feasible(&self, path: &[VehicleId]) -> bool {
        if path.len() < 2 || path.len() - 1 > self.cfg.max_hops {
            return false;
        }
        let positions: Vec<Vec2> = path.iter().map(|&v| self.pos(v)).collect();
        if !check_connectivity(&positions, self.topo.v2v_radius_m)
            || !check_advancement(&positions, self.pos(self.dst))
        {
            return false;
        }
        let record = PathRecord::new(
            path.iter().map(|&v| PathNode::vehicle(v, 0.0)).collect(),
            path.windows(2).map(|w| self.quality(w[0], w[1])).collect(),
        )
        .unwrap();
        let delay = path_delay(&record, &self.cfg.delay, self.cfg.channel.packet_bits).unwrap();
        check_reliability(&record, &self.cfg.constraints)
            && check_delay(delay, &self.cfg.constraints)
    }

    pub fn cost(&self, path: &[VehicleId]) -> f64 {
        path.windows(2).map(|w| self.edge_metric(w[0], w[1])).sum()
    }
}

/// Depth-first search over acyclic paths along C1/C2-admissible edges.
pub fn exhaustive_optimum(inst: &SmallInstance) -> Option<(f64, Vec<VehicleId>)> {
    let n = inst.topo.n_vehicles();
    let pd = inst.pos(inst.dst);
    let mut best: Option<(f64, Vec<VehicleId>)> = None;
    let mut stack = vec![inst.src];
    fn dfs(
        inst: &SmallInstance,
        n: usize,
        pd: Vec2,
        stack: &mut Vec<VehicleId>,
        cost: f64,
        pdr: f64,
        best: &mut Option<(f64, Vec<VehicleId>)>,
    ) {
        let cur = *stack.last().unwrap();
        if cur == inst.dst {
            if inst.feasible(stack) && best.as_ref().is_none_or(|(b, _)| cost < *b) {
                *best = Some((cost, stack.clone()));
            }
            return;
        }
        if stack.len() > inst.cfg.max_hops {
            return;
        }
        for j in (0..n as u32).map(VehicleId) {
            if stack.contains(&j) {
                continue;
            }
            let (pc, pj) = (inst.pos(cur), inst.pos(j));
            if distance(pc, pj) > inst.topo.v2v_radius_m || distance(pj, pd) >= distance(pc, pd) {
                continue;
            }
            let prr = inst.quality(cur, j).prr;
            if pdr * prr < inst.cfg.constraints.pdr_min {
                continue;
            }
            stack.push(j);
            dfs(
                inst,
                n,
                pd,
                stack,
                cost + inst.edge_metric(cur, j),
                pdr * prr,
                best,
            );
            stack.pop();
        }
    }
    dfs(inst, n, pd, &mut stack, 0.0, 1.0, &mut best);
    best
}

/// Every ordering of every subset of intermediate vehicles, checked from
/// scratch.
pub fn brute_force_optimum(inst: &SmallInstance) -> Option<f64> {
    let middle: Vec<VehicleId> = (0..inst.topo.n_vehicles() as u32)
        .map(VehicleId)
        .filter(|&v| v != inst.src && v != inst.dst)
        .collect();
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << middle.len()) {
        let mut chosen: Vec<VehicleId> = middle
            .iter()
            .enumerate()
            .filter(|(k, _)| mask & (1 << k) != 0)
            .map(|(_, &v)| v)
            .collect();
        permute(&mut chosen, 0, &mut |order| {
            let mut path = vec![inst.src];
            path.extend_from_slice(order);
            path.push(inst.dst);
            if inst.feasible(&path) {
                let c = inst.cost(&path);
                if best.is_none_or(|b| c < b) {
                    best = Some(c);
                }
            }
        });
    }
    best
}

fn permute(items: &mut [VehicleId], k: usize, f: &mut impl FnMut(&[VehicleId])) {
    if k == items.len() {
        f(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, f);
        items.swap(k, i);
    }
}

#[derive(Debug, Clone, Copy)]
pub struct OracleCase {
    pub greedy_delivered: bool,
    /// Greedy delivered along a path satisfying every constraint.
    pub greedy_feasible: bool,
    pub greedy_cost: Option<f64>,
    pub oracle_cost: Option<f64>,
    pub brute_cost: Option<f64>,
}

pub fn run_case(seed: u64) -> OracleCase {
    let inst = small_instance(seed);
    let runner = EpisodeRunner::new(&inst.cfg, &inst.topo).unwrap();
    let ep = runner
        .run_between(
            Algorithm::Proposed,
            inst.episode,
            inst.src,
            inst.dst,
            &mut QTable::new(),
        )
        .unwrap();
    let delivered = ep.metrics.delivered;
    let feasible = delivered && audit::audit_path(&ep, &inst.cfg).unwrap().is_empty();
    OracleCase {
        greedy_delivered: delivered,
        greedy_feasible: feasible,
        greedy_cost: delivered.then(|| audit::recorded_cost(&ep).unwrap()),
        oracle_cost: exhaustive_optimum(&inst).map(|(c, _)| c),
        brute_cost: brute_force_optimum(&inst),
    }
}
