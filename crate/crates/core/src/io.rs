//! Config loading and result files.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::sim::{Algorithm, SimConfig, SweepRow};

/// Column order of the results CSV. Downstream tools depend on it.
pub const CSV_HEADER: [&str; 9] = [
    "n_vehicles",
    "algorithm",
    "interruptions_mean",
    "pdr",
    "ber_mean",
    "throughput_bps",
    "delay_mean_s",
    "path_len_mean",
    "composite_score",
];

pub const CSV_FILE: &str = "results.csv";
pub const JSON_FILE: &str = "results.json";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

/// Parses and validates a config document. Missing keys take their defaults.
pub fn parse_config(text: &str, path: &Path) -> Result<SimConfig> {
    let cfg: SimConfig = serde_json::from_str(text).map_err(|source| Error::ConfigParse {
        path: path.to_path_buf(),
        source,
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<SimConfig> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text, path)
}

/// SHA-256 of the fully expanded config, hex encoded.
pub fn config_digest(cfg: &SimConfig) -> String {
    let canonical = serde_json::to_vec(cfg).expect("config serialises");
    hex::encode(Sha256::digest(&canonical))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_digest: String,
    pub code_version: String,
    pub seed: u64,
    pub timestamp_unix_s: u64,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn new(cfg: &SimConfig) -> Self {
        Self {
            config_digest: config_digest(cfg),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            seed: cfg.seed,
            timestamp_unix_s: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            outputs: Vec::new(),
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// CSV text of `rows`; absent values are empty fields.
pub fn rows_to_csv(rows: &[SweepRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let write_err = |e: csv::Error| Error::ResultsParse(e.to_string());
    w.write_record(CSV_HEADER).map_err(write_err)?;
    for r in rows {
        w.write_record([
            r.n_vehicles.to_string(),
            r.algorithm.name().to_string(),
            r.interruptions_mean.to_string(),
            r.pdr.to_string(),
            opt(r.ber_mean),
            r.throughput_bps.to_string(),
            opt(r.delay_mean_s),
            opt(r.path_len_mean),
            r.composite_score.to_string(),
        ])
        .map_err(write_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::ResultsParse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn rows_from_csv(text: &str) -> Result<Vec<SweepRow>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = r
        .headers()
        .map_err(|e| Error::ResultsParse(e.to_string()))?
        .clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::ResultsParse(format!(
            "unexpected header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| Error::ResultsParse(e.to_string()))?;
        let line = i + 2;
        let num = |k: usize| -> Result<f64> {
            rec[k].parse().map_err(|_| {
                Error::ResultsParse(format!("line {line}: bad {} {:?}", CSV_HEADER[k], &rec[k]))
            })
        };
        let maybe = |k: usize| -> Result<Option<f64>> {
            if rec[k].is_empty() {
                Ok(None)
            } else {
                num(k).map(Some)
            }
        };
        let n_vehicles = rec[0].parse().map_err(|_| {
            Error::ResultsParse(format!("line {line}: bad n_vehicles {:?}", &rec[0]))
        })?;
        let algorithm: Algorithm = rec[1].parse().map_err(|_| {
            Error::ResultsParse(format!("line {line}: bad algorithm {:?}", &rec[1]))
        })?;
        rows.push(SweepRow {
            n_vehicles,
            algorithm,
            interruptions_mean: num(2)?,
            pdr: num(3)?,
            ber_mean: maybe(4)?,
            throughput_bps: num(5)?,
            delay_mean_s: maybe(6)?,
            path_len_mean: maybe(7)?,
            composite_score: num(8)?,
        });
    }
    Ok(rows)
}

pub fn read_results_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    rows_from_csv(&text)
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Writes the CSV (always), the JSON mirror (for [`OutputFormat::Json`]) and
/// the manifest sidecar into `dir`. Returns the manifest as written.
pub fn write_results(
    dir: &Path,
    rows: &[SweepRow],
    mut manifest: RunManifest,
    format: OutputFormat,
) -> Result<RunManifest> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let csv_path = dir.join(CSV_FILE);
    write_file(&csv_path, rows_to_csv(rows)?.as_bytes())?;
    manifest.outputs = vec![csv_path];
    if format == OutputFormat::Json {
        let json_path = dir.join(JSON_FILE);
        let json = serde_json::to_vec_pretty(rows).expect("rows serialise");
        write_file(&json_path, &json)?;
        manifest.outputs.push(json_path);
    }
    let manifest_path = dir.join(MANIFEST_FILE);
    let json = serde_json::to_vec_pretty(&manifest).expect("manifest serialises");
    write_file(&manifest_path, &json)?;
    Ok(manifest)
}
