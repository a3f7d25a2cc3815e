//! Command implementations. Each returns the text for standard output, or a
//! [`Failure`] carrying the exit code.

use std::fmt;
use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context};
use log::{info, warn};
use relfam::io::{
    coverize, load_cache, load_system, parse_covering, serialize_cache, serialize_system, CoverizationSpec,
    CoverizeWarning, Table,
};
use relfam::{CoveringDecisionSystem, Engine, EngineError, ReductionCache};

use crate::bench::{rows_to_csv, run_bench, BenchConfig, BenchError};

pub const EXIT_INPUT: u8 = 1;
pub const EXIT_ENGINE: u8 = 2;
pub const EXIT_MISMATCH: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl Failure {
    fn input(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: EXIT_INPUT,
            error: error.into(),
        }
    }

    fn engine(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: EXIT_ENGINE,
            error: error.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.error)
    }
}

pub type CmdResult = Result<String, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::input)
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::input)
}

fn load(path: &Path) -> Result<CoveringDecisionSystem, Failure> {
    let text = read(path)?;
    load_system(&text)
        .with_context(|| format!("loading {}", path.display()))
        .map_err(Failure::input)
}

fn render(cache: &ReductionCache) -> String {
    let mut out = String::new();
    for line in cache.reducts.lines(&cache.names) {
        out.push_str(&line);
        out.push('\n');
    }
    if !cache.consistency.is_consistent() {
        out.push_str("# inconsistent (POS ≠ U)\n");
    }
    out
}

pub fn validate(path: &Path) -> CmdResult {
    let system = load(path)?;
    let positive = relfam::approximation::positive_region(&system);
    let status = if positive.is_full() { "consistent" } else { "inconsistent" };
    Ok(format!(
        "ok: {} objects, {} coverings, {} decision classes, {status}\nfingerprint: {}\n",
        system.universe_size(),
        system.num_coverings(),
        system.decision().classes().len(),
        system.fingerprint()
    ))
}

pub fn reduce(engine: &Engine, path: &Path, cache_out: Option<&Path>, verify: bool) -> CmdResult {
    let system = load(path)?;
    let cache = engine.batch_reducts(&system).map_err(Failure::engine)?;
    let mut out = render(&cache);
    if let Some(p) = cache_out {
        write(p, &serialize_cache(&cache))?;
    }
    if verify {
        let oracle = engine.oracle_reducts(&system).map_err(Failure::engine)?;
        if oracle != cache.reducts {
            return Err(Failure {
                code: EXIT_MISMATCH,
                error: anyhow!(
                    "verification failed: related-family reducts {:?}, definition-level reducts {:?}",
                    cache.reducts.lines(&cache.names),
                    oracle.lines(&cache.names)
                ),
            });
        }
        out.push_str("verify: OK\n");
    }
    Ok(out)
}

pub enum Update<'a> {
    Add(&'a Path),
    Delete(&'a str),
}

/// Applies one incremental update. The refreshed cache overwrites
/// `cache_path`; the updated system goes to `system_out` when given.
pub fn update(
    engine: &Engine,
    path: &Path,
    change: Update<'_>,
    cache_path: &Path,
    system_out: Option<&Path>,
) -> CmdResult {
    let system = load(path)?;
    let cache = load_cache(&read(cache_path)?)
        .with_context(|| format!("loading cache {}", cache_path.display()))
        .map_err(Failure::input)?;
    let outcome = match change {
        Update::Add(covering_path) => {
            let covering = parse_covering(&read(covering_path)?, system.universe_size())
                .with_context(|| format!("loading covering {}", covering_path.display()))
                .map_err(Failure::input)?;
            engine.add_covering(&system, &cache, covering)
        }
        Update::Delete(name) => engine.delete_covering(&system, &cache, name),
    }
    .map_err(|e: EngineError| Failure::engine(e))?;
    info!("update path {:?}", outcome.report.path);
    if outcome.report.repaired {
        warn!("difference rule failed verification; reducts were re-minimized");
    }
    write(cache_path, &serialize_cache(&outcome.cache))?;
    if let Some(p) = system_out {
        write(p, &serialize_system(&outcome.system))?;
    }
    Ok(render(&outcome.cache))
}

pub fn bench(engine: &Engine, config_path: &Path, out: Option<&Path>) -> CmdResult {
    let config = BenchConfig::parse(&read(config_path)?)
        .with_context(|| format!("parsing {}", config_path.display()))
        .map_err(Failure::input)?;
    let rows = run_bench(&config, engine).map_err(|e| match e {
        BenchError::Mismatch { .. } => Failure {
            code: EXIT_MISMATCH,
            error: e.into(),
        },
        BenchError::Config(_) => Failure::input(e),
        _ => Failure::engine(e),
    })?;
    let csv = rows_to_csv(&rows);
    match out {
        Some(p) => {
            write(p, &csv)?;
            Ok(String::new())
        }
        None => Ok(csv),
    }
}

pub fn coverize_cmd(csv_path: &Path, spec_path: &Path, out: &Path) -> CmdResult {
    let table = Table::parse_csv(&read(csv_path)?).map_err(Failure::input)?;
    let spec = CoverizationSpec::parse(&read(spec_path)?)
        .with_context(|| format!("parsing {}", spec_path.display()))
        .map_err(Failure::input)?;
    let result = coverize(&table, &spec).map_err(Failure::input)?;
    for w in &result.warnings {
        match w {
            CoverizeWarning::ConstantColumn(c) => {
                warn!("column `{c}` is constant; its covering is the single block U")
            }
        }
    }
    write(out, &serialize_system(&result.system))?;
    Ok(format!(
        "wrote {}: {} objects, {} coverings\n",
        out.display(),
        result.system.universe_size(),
        result.system.num_coverings()
    ))
}
