use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use iov_core::baselines::QTable;
use iov_core::io::{self, OutputFormat, RunManifest};
use iov_core::sim::{self, EpisodeRunner, TraceEvent};
use iov_core::{Algorithm, Error, SimConfig, Topology};

#[derive(Parser)]
#[command(
    name = "iov-sim",
    version,
    about = "Vehicular multi-hop routing simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the density sweep and write result files.
    Sweep(RunArgs),
    /// Run one episode and print a hop-by-hop trace.
    Episode {
        #[command(flatten)]
        run: RunArgs,
        /// Episode index; selects the source/destination pair and fading.
        #[arg(long, default_value_t = 0)]
        index: u64,
    },
    /// Load and check a config, then exit.
    Validate {
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Recompute composite scores from an existing results CSV.
    Score {
        /// Results CSV to rescore.
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Directory for the rescored results; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::All)]
    algorithm: AlgorithmArg,
    /// Comma-separated vehicle counts.
    #[arg(long, value_delimiter = ',')]
    vehicles: Option<Vec<usize>>,
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Proposed,
    RsuV2v,
    LaV2v,
    Mrl,
    DrlQos,
    All,
}

impl AlgorithmArg {
    fn algorithms(self) -> Vec<Algorithm> {
        match self {
            AlgorithmArg::Proposed => vec![Algorithm::Proposed],
            AlgorithmArg::RsuV2v => vec![Algorithm::RsuV2v],
            AlgorithmArg::LaV2v => vec![Algorithm::LaV2v],
            AlgorithmArg::Mrl => vec![Algorithm::Mrl],
            AlgorithmArg::DrlQos => vec![Algorithm::DrlQos],
            AlgorithmArg::All => Algorithm::ALL.to_vec(),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

fn load(config: Option<&Path>) -> Result<SimConfig, Error> {
    match config {
        Some(p) => io::load_config(p),
        None => Ok(SimConfig::default()),
    }
}

impl RunArgs {
    fn config(&self) -> Result<SimConfig, Error> {
        let mut cfg = load(self.config.as_deref())?;
        if let Some(v) = &self.vehicles {
            cfg.n_vehicles = v.clone();
        }
        if let Some(e) = self.episodes {
            cfg.episodes = e;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn sweep(args: &RunArgs) -> Result<(), Error> {
    let cfg = args.config()?;
    let rows = sim::run_sweep(&cfg, &args.algorithm.algorithms())?;
    let format = match args.format {
        FormatArg::Csv => OutputFormat::Csv,
        FormatArg::Json => OutputFormat::Json,
    };
    let manifest = io::write_results(&args.out, &rows, RunManifest::new(&cfg), format)?;
    for p in &manifest.outputs {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn episode(args: &RunArgs, index: u64) -> Result<(), Error> {
    let cfg = args.config()?;
    let n = cfg.n_vehicles.first().copied().unwrap_or(50);
    let algorithm = match args.algorithm.algorithms().as_slice() {
        [a] => *a,
        _ => Algorithm::Proposed,
    };
    let topo = Topology::generate(n, &cfg.topology, cfg.seed)?;
    let runner = EpisodeRunner::new(&cfg, &topo)?;
    let ep = runner.run(algorithm, index, &mut QTable::new())?;
    let m = &ep.metrics;
    println!(
        "episode {index}: {algorithm}, {n} vehicles, seed {}, {} -> {}",
        cfg.seed, m.src, m.dst
    );
    let fmt_opt = |v: Option<f64>, digits: usize| match v {
        Some(x) => format!("{x:.digits$}"),
        None => "-".to_string(),
    };
    for e in &ep.trace {
        match e {
            TraceEvent::Carry { slot, at } => println!("slot {slot:>4}  carry at {at}"),
            TraceEvent::Hop(h) => println!(
                "slot {:>4}  {} -> {}  mode={}  M={}  s={:.3}  prr={:.4}  primary={}  backup={}  c_th={}{}  {}",
                h.slot,
                h.from,
                h.to,
                h.mode.map(|m| m.to_string()).unwrap_or_else(|| "-".into()),
                fmt_opt(h.metric, 4),
                h.stability,
                h.quality.prr,
                h.primary.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                h.backup.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                fmt_opt(h.c_th, 3),
                if h.switched { "  SWITCH" } else { "" },
                if h.success { "ok" } else { "lost" },
            ),
        }
    }
    println!(
        "outcome: {:?}, hops {}, interruptions {}, switches {}, delay {:.6} s",
        m.termination, m.hops, m.interruptions, m.switches, m.e2e_delay_s
    );
    Ok(())
}

fn validate(config: Option<&Path>) -> Result<(), Error> {
    let cfg = load(config)?;
    cfg.validate()?;
    println!("config ok, digest {}", io::config_digest(&cfg));
    Ok(())
}

fn score(csv: &Path, config: Option<&Path>, out: Option<&Path>) -> Result<(), Error> {
    let cfg = load(config)?;
    let mut rows = io::read_results_csv(csv)?;
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, r) in rows.iter().enumerate() {
        groups.entry(r.n_vehicles).or_default().push(i);
    }
    for idx in groups.values() {
        let tuples: Vec<_> = idx
            .iter()
            .map(|&i| sim::metric_tuple(&rows[i], &cfg))
            .collect();
        for (&i, s) in idx.iter().zip(sim::composite_score(&tuples)?) {
            rows[i].composite_score = s;
        }
    }
    match out {
        Some(dir) => {
            let manifest =
                io::write_results(dir, &rows, RunManifest::new(&cfg), OutputFormat::Csv)?;
            for p in &manifest.outputs {
                println!("wrote {}", p.display());
            }
        }
        None => print!("{}", io::rows_to_csv(&rows)?),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Sweep(args) => sweep(args),
        Command::Episode { run, index } => episode(run, *index),
        Command::Validate { config } => validate(config.as_deref()),
        Command::Score { csv, config, out } => score(csv, config.as_deref(), out.as_deref()),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
