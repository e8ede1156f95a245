use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Algorithm, SimConfig};
use super::episode::{EpisodeMetrics, EpisodeRunner};
use crate::baselines::QTable;
use crate::error::{Error, Result};
use crate::topology::Topology;

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "IOV_SIM_THREADS";

/// Aggregated metrics of one algorithm at one density. Delay and path length
/// are absent when no episode was delivered; BER is absent when no hop was
/// attempted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n_vehicles: usize,
    pub algorithm: Algorithm,
    pub interruptions_mean: f64,
    pub pdr: f64,
    pub ber_mean: Option<f64>,
    pub throughput_bps: f64,
    pub delay_mean_s: Option<f64>,
    pub path_len_mean: Option<f64>,
    pub composite_score: f64,
}

/// Episode outcome counts at one sweep point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub delivered: usize,
    /// Lost to a failed hop or to a missing route.
    pub dropped: usize,
    /// Stopped by the hop, delay or reliability guard.
    pub aborted: usize,
}

#[derive(Debug, Clone)]
pub struct PointRun {
    pub n_vehicles: usize,
    pub algorithm: Algorithm,
    pub episodes: Vec<EpisodeMetrics>,
}

impl PointRun {
    pub fn tally(&self) -> Tally {
        let mut t = Tally::default();
        for e in &self.episodes {
            if e.delivered {
                t.delivered += 1;
            } else if e.termination.is_aborted() {
                t.aborted += 1;
            } else {
                t.dropped += 1;
            }
        }
        t
    }

    /// Aggregate row with a zero composite score; see [`composite_score`].
    pub fn row(&self) -> SweepRow {
        let eps = &self.episodes;
        let n = eps.len().max(1) as f64;
        let delivered: Vec<&EpisodeMetrics> = eps.iter().filter(|e| e.delivered).collect();
        let attempted: usize = eps.iter().map(|e| e.attempted_hops).sum();
        let ber_sum: f64 = eps.iter().map(|e| e.ber_sum).sum();
        let bits: f64 = eps.iter().map(|e| e.delivered_bits).sum();
        let time: f64 = eps.iter().map(|e| e.active_time_s).sum();
        let mean_over_delivered = |f: &dyn Fn(&EpisodeMetrics) -> f64| {
            (!delivered.is_empty())
                .then(|| delivered.iter().map(|e| f(e)).sum::<f64>() / delivered.len() as f64)
        };
        SweepRow {
            n_vehicles: self.n_vehicles,
            algorithm: self.algorithm,
            interruptions_mean: eps.iter().map(|e| e.interruptions as f64).sum::<f64>() / n,
            pdr: delivered.len() as f64 / n,
            ber_mean: (attempted > 0).then(|| ber_sum / attempted as f64),
            throughput_bps: if time > 0.0 { bits / time } else { 0.0 },
            delay_mean_s: mean_over_delivered(&|e| e.e2e_delay_s),
            path_len_mean: mean_over_delivered(&|e| e.hops as f64),
            composite_score: 0.0,
        }
    }
}

/// Runs every episode of one algorithm on `snapshot`. MRL episodes run in
/// order because its Q-table carries over from one episode to the next; the
/// other algorithms run episodes in parallel.
pub fn run_point_on(
    cfg: &SimConfig,
    algorithm: Algorithm,
    snapshot: &Topology,
) -> Result<PointRun> {
    let runner = EpisodeRunner::new(cfg, snapshot)?;
    let episodes = if algorithm == Algorithm::Mrl {
        let mut q = QTable::new();
        (0..cfg.episodes as u64)
            .map(|e| runner.run(algorithm, e, &mut q).map(|ep| ep.metrics))
            .collect::<Result<Vec<_>>>()?
    } else {
        (0..cfg.episodes as u64)
            .into_par_iter()
            .map(|e| {
                runner
                    .run(algorithm, e, &mut QTable::new())
                    .map(|ep| ep.metrics)
            })
            .collect::<Result<Vec<_>>>()?
    };
    Ok(PointRun {
        n_vehicles: snapshot.n_vehicles(),
        algorithm,
        episodes,
    })
}

pub fn run_point(cfg: &SimConfig, algorithm: Algorithm, n_vehicles: usize) -> Result<PointRun> {
    let topo = Topology::generate(n_vehicles, &cfg.topology, cfg.seed)?;
    run_point_on(cfg, algorithm, &topo)
}

/// Full density sweep. At each density all algorithms share one topology.
/// Rows are ordered by density, then by the order of `algorithms`.
pub fn run_sweep(cfg: &SimConfig, algorithms: &[Algorithm]) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    with_thread_cap(|| {
        let mut rows = Vec::new();
        for &n in &cfg.n_vehicles {
            let topo = Topology::generate(n, &cfg.topology, cfg.seed)?;
            let mut point: Vec<SweepRow> = algorithms
                .iter()
                .map(|&a| {
                    log::info!("running {a} at {n} vehicles");
                    run_point_on(cfg, a, &topo).map(|p| p.row())
                })
                .collect::<Result<_>>()?;
            if !point.is_empty() {
                let tuples: Vec<_> = point.iter().map(|r| metric_tuple(r, cfg)).collect();
                for (row, s) in point.iter_mut().zip(composite_score(&tuples)?) {
                    row.composite_score = s;
                }
            }
            rows.extend(point);
        }
        Ok(rows)
    })
}

/// Runs `f` inside a pool limited by [`THREADS_ENV`] when it is set.
pub fn with_thread_cap<T: Send>(f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return f();
    };
    let threads: usize = raw.trim().parse().ok().filter(|&t| t > 0).ok_or_else(|| {
        Error::InvalidConfig(format!(
            "{THREADS_ENV} must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("cannot build thread pool: {e}")))?
        .install(f)
}

/// The five composite inputs of a row:
/// (interruptions, pdr, ber, throughput, delay). A missing BER is scored as
/// 0.5 and a missing delay as the delay bound, the worst values either can take.
pub fn metric_tuple(row: &SweepRow, cfg: &SimConfig) -> [f64; 5] {
    [
        row.interruptions_mean,
        row.pdr,
        row.ber_mean.unwrap_or(0.5),
        row.throughput_bps,
        row.delay_mean_s.unwrap_or(cfg.constraints.t_max_s),
    ]
}

const HIGHER_IS_BETTER: [bool; 5] = [false, true, false, true, false];

/// Equal-weight min-max composite in [0, 100]. A metric on which every
/// algorithm ties contributes 0.5.
pub fn composite_score(tuples: &[[f64; 5]]) -> Result<Vec<f64>> {
    if tuples.is_empty() {
        return Err(Error::ContractViolation(
            "composite score of zero algorithms".into(),
        ));
    }
    if tuples.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::ContractViolation(
            "composite inputs must be finite".into(),
        ));
    }
    let mut scores = vec![0.0; tuples.len()];
    for (k, &up) in HIGHER_IS_BETTER.iter().enumerate() {
        let (lo, hi) = tuples
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), t| {
                (lo.min(t[k]), hi.max(t[k]))
            });
        for (s, t) in scores.iter_mut().zip(tuples) {
            let norm = if hi > lo {
                (t[k] - lo) / (hi - lo)
            } else {
                0.5
            };
            *s += 0.2 * if up { norm } else { 1.0 - norm };
        }
    }
    Ok(scores
        .into_iter()
        .map(|s| (s * 100.0).clamp(0.0, 100.0))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dominating_algorithm_scores_extremes() {
        let good = [0.0, 1.0, 0.01, 1e6, 0.01];
        let bad = [1.0, 0.0, 0.3, 1e3, 0.5];
        let s = composite_score(&[good, bad]).unwrap();
        assert!((s[0] - 100.0).abs() < 1e-12);
        assert!(s[1].abs() < 1e-12);
    }

    #[test]
    fn three_to_two_split_gives_sixty_forty() {
        // A wins interruptions, PDR and BER; B wins throughput and delay.
        let a = [0.0, 1.0, 0.0, 0.0, 1.0];
        let b = [1.0, 0.0, 1.0, 1.0, 0.0];
        let s = composite_score(&[a, b]).unwrap();
        assert!((s[0] - 60.0).abs() < 1e-12);
        assert!((s[1] - 40.0).abs() < 1e-12);
    }

    #[test]
    fn all_equal_metric_contributes_half() {
        let a = [0.5; 5];
        let s = composite_score(&[a, a, a]).unwrap();
        for v in s {
            assert!((v - 50.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_delivered_rows_have_absent_markers() {
        let run = PointRun {
            n_vehicles: 10,
            algorithm: Algorithm::Proposed,
            episodes: vec![],
        };
        let row = run.row();
        assert_eq!(row.pdr, 0.0);
        assert_eq!(row.delay_mean_s, None);
        assert_eq!(row.path_len_mean, None);
        assert_eq!(row.ber_mean, None);
    }
}
