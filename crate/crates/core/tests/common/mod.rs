//! Instance generators and invariant checks shared by the property suite and
//! the acceptance target. Every check takes a case seed and returns a
//! description of the first broken invariant.

#![allow(dead_code, clippy::neg_cmp_op_on_partial_ord)]

pub mod oracle;

use iov_core::baselines::{
    drl_qos_next_hop, la_v2v_next_hop, mrl_next_hop, rsu_v2v_next_hop, BaselineParams, QTable,
    StaticScoreWeights,
};
use iov_core::channel;
use iov_core::links::{FadingField, FadingMode, LinkEnv};
use iov_core::netstate::vehicle_load;
use iov_core::routing::{
    adapt_weights, choose, evaluate_candidates, link_stability, recovery_candidates,
    screen_candidates, select_mode, v2v_candidates, MetricWeights, ProposedRouter, Recovery,
    TransmissionMode, Visited,
};
use iov_core::sim::{audit, EpisodeRunner};
use iov_core::topology::distance;
use iov_core::{Algorithm, SimConfig, Topology, TopologyParams, VehicleId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<(), String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

/// A random road (shorter than the default so neighbourhoods are dense)
/// with random per-vehicle loads.
pub fn random_topology(r: &mut ChaCha8Rng) -> Topology {
    let params = TopologyParams {
        road_length_m: r.random_range(800.0..6000.0),
        ..TopologyParams::default()
    };
    let n = r.random_range(2..120);
    let mut topo = Topology::generate(n, &params, r.random()).expect("valid params");
    for v in &mut topo.vehicles {
        if r.random_bool(0.3) {
            v.queue_len = r.random_range(0.0..=v.buffer_cap);
        }
    }
    topo
}

pub fn distinct_pair(r: &mut ChaCha8Rng, n: usize) -> (VehicleId, VehicleId) {
    let a = r.random_range(0..n as u32);
    let mut b = r.random_range(0..n as u32 - 1);
    if b >= a {
        b += 1;
    }
    (VehicleId(a), VehicleId(b))
}

pub fn random_visited(r: &mut ChaCha8Rng, n: usize, src: VehicleId, dst: VehicleId) -> Visited {
    let mut v = Visited::new(n);
    v.insert(src);
    for i in 0..n as u32 {
        if VehicleId(i) != dst && r.random_bool(0.1) {
            v.insert(VehicleId(i));
        }
    }
    v
}

pub fn random_weights(r: &mut ChaCha8Rng) -> MetricWeights {
    let raw: [f64; 4] = std::array::from_fn(|_| r.random_range(0.0..1.0) + 1e-6);
    let s: f64 = raw.iter().sum();
    let w = raw.map(|x| x / s);
    MetricWeights::new(w[0], w[1], w[2], 1.0 - w[0] - w[1] - w[2]).expect("normalised")
}

// ---- numeric invariants ------------------------------------------------

pub fn weights_renormalise(seed: u64) -> Check {
    let mut r = rng(seed);
    let w = random_weights(&mut r);
    let c = r.random_range(0.0..=1.0);
    let q = r.random_range(0.0..=1.0);
    let a = adapt_weights(&w, c, q);
    ensure!((a.sum() - 1.0).abs() <= 1e-9, "weights sum to {}", a.sum());
    ensure!(
        [a.alpha, a.beta, a.gamma, a.delta]
            .iter()
            .all(|x| *x >= 0.0),
        "negative weight {a:?}"
    );
    Ok(())
}

pub fn stability_bounds(seed: u64) -> Check {
    let mut r = rng(seed);
    let v = r.random_range(0.0..80.0);
    let d = r.random_range(0.0..600.0);
    let s = link_stability(v, d, 30.0, 300.0);
    ensure!((0.0..=1.0).contains(&s), "stability {s} out of range");
    let dv = r.random_range(0.0..20.0);
    let dd = r.random_range(0.0..200.0);
    ensure!(
        link_stability(v + dv, d, 30.0, 300.0) <= s,
        "stability increased with relative speed"
    );
    ensure!(
        link_stability(v, d + dd, 30.0, 300.0) <= s,
        "stability increased with distance"
    );
    Ok(())
}

pub fn prr_ber_bounds(seed: u64) -> Check {
    let mut r = rng(seed);
    let snr = 10f64.powf(r.random_range(-4.0..4.0));
    let snr2 = snr * 10f64.powf(r.random_range(0.0..2.0));
    let (b1, b2) = (channel::ber(snr), channel::ber(snr2));
    let (p1, p2) = (channel::prr(b1), channel::prr(b2));
    ensure!(
        (0.0..=0.5).contains(&b1),
        "ber {b1} out of range at snr {snr}"
    );
    ensure!((0.01..=0.999).contains(&p1), "prr {p1} out of range");
    ensure!(b2 <= b1, "ber increased with snr");
    ensure!(p2 >= p1, "prr decreased with snr");
    Ok(())
}

// ---- screening and decisions -------------------------------------------

struct Scene {
    topo: Topology,
    src: VehicleId,
    dst: VehicleId,
    visited: Visited,
    fading: FadingField,
    slot: u64,
}

fn scene(seed: u64) -> Scene {
    let mut r = rng(seed);
    let topo = random_topology(&mut r);
    let (src, dst) = distinct_pair(&mut r, topo.n_vehicles());
    let visited = random_visited(&mut r, topo.n_vehicles(), src, dst);
    let fading = FadingField::new(r.random(), r.random_range(0..100), FadingMode::PerSlot);
    Scene {
        topo,
        src,
        dst,
        visited,
        fading,
        slot: r.random_range(0..50),
    }
}

fn satisfies_c1_c2(s: &Scene, w: VehicleId, q_max: f64) -> Check {
    let ps = s.topo.position(s.src).unwrap();
    let pd = s.topo.position(s.dst).unwrap();
    let pw = s.topo.position(w).unwrap();
    ensure!(w != s.src, "source is its own candidate");
    ensure!(!s.visited.contains(w), "visited node {w} admitted");
    ensure!(distance(ps, pw) <= s.topo.v2v_radius_m, "C1 broken by {w}");
    if w != s.dst {
        ensure!(distance(pw, pd) < distance(ps, pd), "C2 broken by {w}");
        ensure!(
            vehicle_load(s.topo.vehicle(w).unwrap()) <= q_max,
            "overloaded candidate {w}"
        );
    }
    Ok(())
}

pub fn candidates_satisfy_c1_c2(seed: u64) -> Check {
    let s = scene(seed);
    let q_max = 0.95;
    let (mode, rsus) = select_mode(&s.topo, s.src).unwrap();
    let screened =
        screen_candidates(&s.topo, s.src, s.dst, mode, &rsus, &s.visited, q_max).unwrap();
    for &w in &screened.candidates {
        satisfies_c1_c2(&s, w, q_max)?;
        if screened.mode == TransmissionMode::V2I && w != s.dst {
            let pw = s.topo.position(w).unwrap();
            ensure!(
                rsus.iter().any(|&r| s.topo.in_rsu_coverage(pw, r).unwrap()),
                "V2I candidate {w} outside every reachable RSU"
            );
        }
    }
    // Every vehicle passing C1 and C2 is admitted in V2V mode.
    let v2v = v2v_candidates(&s.topo, s.src, s.dst, &s.visited, q_max).unwrap();
    for v in &s.topo.vehicles {
        let admitted = satisfies_c1_c2(&s, v.id, q_max).is_ok();
        ensure!(
            admitted == v2v.contains(&v.id),
            "V2V screening disagrees with C1/C2 on {}",
            v.id
        );
    }
    Ok(())
}

pub fn decision_is_consistent(seed: u64) -> Check {
    let s = scene(seed);
    let cfg = SimConfig::default();
    let env = LinkEnv {
        topo: &s.topo,
        channel: &cfg.channel,
        fading: &s.fading,
        slot: s.slot,
    };
    let mut router = ProposedRouter::new(&cfg.proposed).unwrap();
    let d = router
        .decide(
            &env,
            s.src,
            s.dst,
            &s.visited,
            &cfg.congestion,
            cfg.constraints.q_max,
        )
        .unwrap();

    let (mode, rsus) = select_mode(&s.topo, s.src).unwrap();
    let screened = screen_candidates(
        &s.topo,
        s.src,
        s.dst,
        mode,
        &rsus,
        &s.visited,
        cfg.constraints.q_max,
    )
    .unwrap();
    let pool = if screened.candidates.is_empty() {
        match recovery_candidates(&s.topo, s.src, s.dst, &s.visited, cfg.constraints.q_max).unwrap()
        {
            Recovery::Candidates(c) => c,
            Recovery::Carry => {
                ensure!(d.mode == TransmissionMode::Carry, "expected carry");
                ensure!(d.chosen.is_none(), "carry with a chosen node");
                return Ok(());
            }
        }
    } else {
        ensure!(
            d.mode == screened.mode,
            "mode {} vs {}",
            d.mode,
            screened.mode
        );
        screened.candidates.clone()
    };
    let chosen = d.chosen.ok_or("no choice from a non-empty pool")?;
    ensure!(pool.contains(&chosen), "chosen {chosen} outside the pool");
    ensure!(
        !s.visited.contains(chosen),
        "chosen {chosen} already visited"
    );
    ensure!(
        Some(chosen) == d.primary || Some(chosen) == d.backup,
        "chosen is neither primary nor backup"
    );
    if d.mode != TransmissionMode::Recovery {
        satisfies_c1_c2(&s, chosen, cfg.constraints.q_max)?;
    }

    let evals = evaluate_candidates(
        &env,
        s.src,
        &pool,
        d.c_global,
        &d.weights,
        cfg.proposed.v_ref_mps,
    )
    .unwrap();
    let primary = evals.iter().find(|e| Some(e.node) == d.primary).unwrap();
    let backup = evals.iter().find(|e| Some(e.node) == d.backup).unwrap();
    for e in &evals {
        ensure!(primary.metric <= e.metric, "primary not the metric minimum");
        ensure!(
            backup.stability >= e.stability,
            "backup not the stability maximum"
        );
    }

    // Selections survive a positive rescaling of every metric.
    let k = 1.0 + rng(seed ^ 1).random_range(0.0..50.0);
    let scaled: Vec<_> = evals
        .iter()
        .map(|e| {
            let mut e = *e;
            e.metric *= k;
            e
        })
        .collect();
    let a = choose(&evals, f64::INFINITY).unwrap();
    let b = choose(&scaled, f64::INFINITY).unwrap();
    ensure!(
        a.primary.node == b.primary.node,
        "argmin moved under rescaling"
    );
    ensure!(
        a.backup.node == b.backup.node,
        "argmax moved under rescaling"
    );

    // Threshold extremes.
    ensure!(
        a.chosen.node == a.primary.node,
        "c_th = inf must keep primary"
    );
    let lo = choose(&evals, f64::NEG_INFINITY).unwrap();
    if lo.primary.node != lo.backup.node {
        ensure!(
            lo.chosen.node == lo.backup.node,
            "c_th = -inf must take backup"
        );
    }
    Ok(())
}

pub fn baselines_respect_screening(seed: u64) -> Check {
    let s = scene(seed);
    let cfg = SimConfig::default();
    let env = LinkEnv {
        topo: &s.topo,
        channel: &cfg.channel,
        fading: &s.fading,
        slot: s.slot,
    };
    let q_max = cfg.constraints.q_max;
    let bl = BaselineParams::default();
    let rate_max = env.reference_rate(bl.rate_ref_dist_m).unwrap();
    let mut r = rng(seed ^ 2);
    let picks = [
        rsu_v2v_next_hop(&env, s.src, s.dst, &s.visited, &bl.score, rate_max, q_max).unwrap(),
        la_v2v_next_hop(&env, s.src, s.dst, &s.visited, &bl.score, rate_max, q_max).unwrap(),
        mrl_next_hop(
            &mut QTable::new(),
            &env,
            s.src,
            s.dst,
            &s.visited,
            &bl.mrl,
            rate_max,
            q_max,
            &mut r,
        )
        .unwrap(),
        drl_qos_next_hop(
            &env,
            s.src,
            s.dst,
            &s.visited,
            &bl.drl_qos,
            rate_max,
            q_max,
            &mut r,
        )
        .unwrap(),
    ];
    let any = !v2v_candidates(&s.topo, s.src, s.dst, &s.visited, q_max)
        .unwrap()
        .is_empty();
    for (i, p) in picks.iter().enumerate() {
        match p {
            Some(w) => satisfies_c1_c2(&s, *w, q_max)?,
            None => ensure!(!any, "baseline {i} found no hop despite candidates"),
        }
    }
    Ok(())
}

/// LA-V2V with no load penalty decides exactly like RSU-V2V restricted to V2V.
pub fn la_without_load_matches_rsu_v2v(seed: u64) -> Check {
    let s = scene(seed);
    let cfg = SimConfig::default();
    let env = LinkEnv {
        topo: &s.topo,
        channel: &cfg.channel,
        fading: &s.fading,
        slot: s.slot,
    };
    let w = StaticScoreWeights {
        w_load: 0.0,
        ..StaticScoreWeights::default()
    };
    let rate_max = env.reference_rate(100.0).unwrap();
    let mut v2v_only = s.topo.clone();
    v2v_only.rsus.clear();
    let env_v2v = LinkEnv {
        topo: &v2v_only,
        ..env
    };
    let la = la_v2v_next_hop(&env, s.src, s.dst, &s.visited, &w, rate_max, 0.95).unwrap();
    let rsu = rsu_v2v_next_hop(&env_v2v, s.src, s.dst, &s.visited, &w, rate_max, 0.95).unwrap();
    ensure!(la == rsu, "LA-V2V {la:?} vs V2V-mode RSU-V2V {rsu:?}");
    Ok(())
}

// ---- whole episodes ----------------------------------------------------

pub fn episode_config(r: &mut ChaCha8Rng) -> SimConfig {
    SimConfig {
        seed: r.random(),
        fading: if r.random_bool(0.2) {
            FadingMode::Frozen
        } else {
            FadingMode::PerSlot
        },
        ..SimConfig::default()
    }
}

/// Delivered paths are acyclic, pass the offline constraint audit, and (for
/// the proposed scheme) their online cost equals the recomputed path cost.
pub fn episode_audit(seed: u64) -> Check {
    let mut r = rng(seed);
    let cfg = episode_config(&mut r);
    let topo = random_topology(&mut r);
    let alg = Algorithm::ALL[r.random_range(0..Algorithm::ALL.len())];
    let runner = EpisodeRunner::new(&cfg, &topo).unwrap();
    let ep = runner
        .run(alg, r.random_range(0..1000), &mut QTable::new())
        .map_err(|e| e.to_string())?;
    let m = &ep.metrics;
    ep.path.validate().map_err(|e| e.to_string())?;
    ensure!(m.hops <= cfg.max_hops, "{} hops over the limit", m.hops);
    ensure!(m.hops == ep.path.hop_count(), "hop count mismatch");
    ensure!(
        m.interruptions == m.termination.is_interruption() as u32,
        "interruption count {} for {:?}",
        m.interruptions,
        m.termination
    );
    if m.delivered {
        let last = ep.path.nodes.last().unwrap().node;
        ensure!(
            last == iov_core::netstate::NodeRef::Vehicle(m.dst),
            "delivered path ends at {last:?}"
        );
        let v = audit::audit_path(&ep, &cfg).map_err(|e| e.to_string())?;
        ensure!(v.is_empty(), "{alg} delivered path violates {v:?}");
        if alg == Algorithm::Proposed {
            let online = audit::recorded_cost(&ep).ok_or("missing online metric")?;
            let offline = audit::path_cost(&ep).map_err(|e| e.to_string())?;
            ensure!(
                (online - offline).abs() <= 1e-9,
                "cost {online} online vs {offline} offline"
            );
        }
    }
    Ok(())
}
