//! Scenario runner for the `clockbath` library: reads a TOML configuration,
//! runs one scenario and writes CSV/JSON tables plus a run manifest.

pub mod config;
pub mod error;
pub mod output;
pub mod scenarios;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub use config::{Config, Scenario};
pub use error::{CliError, Result};
use output::OutDir;

pub const MANIFEST: &str = "manifest.json";

/// One command-line invocation, before the configuration is resolved.
#[derive(Debug, Clone, Default)]
pub struct Invocation {
    pub config: Option<PathBuf>,
    pub scenario: Option<String>,
    pub seed: Option<u64>,
    pub overrides: Vec<String>,
}

/// Fully resolved configuration. `text` is the canonical TOML that is hashed
/// and stored in the manifest; it includes scenario and seed.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub text: String,
    pub config: Config,
    pub scenario: Scenario,
    pub seed: u64,
    pub sha256: String,
}

fn read_config(path: &Path) -> Result<toml::Table> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    // A manifest from an earlier run carries its resolved configuration.
    let text = match serde_json::from_str::<Value>(&text) {
        Ok(v) => v
            .get("config_toml")
            .and_then(Value::as_str)
            .ok_or_else(|| CliError::Config(format!("{}: JSON without `config_toml`", path.display())))?
            .to_string(),
        Err(_) => text,
    };
    text.parse::<toml::Table>().map_err(|e| CliError::Config(e.to_string()))
}

pub fn resolve(inv: &Invocation) -> Result<Resolved> {
    let mut table = match &inv.config {
        Some(p) => read_config(p)?,
        None => toml::Table::new(),
    };
    for o in &inv.overrides {
        config::apply_override(&mut table, o)?;
    }
    if let Some(s) = &inv.scenario {
        let s: Scenario = s.parse()?;
        table.insert("scenario".into(), toml::Value::try_from(s).expect("scenario serializes"));
    }
    if let Some(seed) = inv.seed {
        let seed = i64::try_from(seed).map_err(|_| CliError::Config(format!("seed {seed} exceeds i64")))?;
        table.insert("seed".into(), toml::Value::Integer(seed));
    }
    table.entry("seed").or_insert(toml::Value::Integer(0));
    let text = toml::to_string(&table).map_err(|e| CliError::Config(e.to_string()))?;
    let config = Config::parse(&text)?;
    let scenario = config
        .scenario
        .ok_or_else(|| CliError::Config("no scenario given".into()))?;
    let seed = config.seed.unwrap_or(0);
    let sha256 = hex::encode(Sha256::digest(text.as_bytes()));
    Ok(Resolved {
        text,
        config,
        scenario,
        seed,
        sha256,
    })
}

/// Run the resolved scenario, writing its tables and `manifest.json` into
/// `out_dir`. Returns the manifest.
pub fn execute(r: &Resolved, out_dir: &Path) -> Result<Value> {
    let start = Instant::now();
    let mut out = OutDir::create(out_dir)?;
    let summary = match r.scenario {
        Scenario::Decay => scenarios::run_decay(&r.config, r.seed, &mut out)?,
        Scenario::DetuningSweep => scenarios::run_detuning_sweep(&r.config, r.seed, &mut out)?,
        Scenario::FieldScan => scenarios::run_field_scan(&r.config, &mut out)?,
        Scenario::Heuristics => scenarios::run_heuristics(&r.config, r.seed, &mut out)?,
    };
    let manifest = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "scenario": r.scenario,
        "seed": r.seed,
        "config_sha256": r.sha256,
        "wall_time_s": start.elapsed().as_secs_f64(),
        "outputs": out.written(),
        "summary": summary,
        "config_toml": r.text,
    });
    out.json(MANIFEST, &manifest)?;
    Ok(manifest)
}

pub fn run(inv: &Invocation, out_dir: &Path) -> Result<Value> {
    execute(&resolve(inv)?, out_dir)
}
