//! Incremental versus batch timing over a grid of generated systems.

use std::time::Instant;

use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relfam::{Engine, EngineError, ModelError, ReductSet};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generate::{generate_covering, generate_system, GeneratorParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpdateKind {
    Add,
    Delete,
}

impl UpdateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            UpdateKind::Add => "add",
            UpdateKind::Delete => "delete",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchConfig {
    pub seed: u64,
    pub universe_sizes: Vec<usize>,
    pub covering_counts: Vec<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_kinds")]
    pub update_kinds: Vec<UpdateKind>,
    #[serde(default)]
    pub generator: GeneratorParams,
}

fn default_trials() -> usize {
    5
}

fn default_kinds() -> Vec<UpdateKind> {
    vec![UpdateKind::Add, UpdateKind::Delete]
}

impl BenchConfig {
    pub fn parse(text: &str) -> Result<Self, toml::de::Error> {
        toml::from_str(text)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub update_kind: UpdateKind,
    pub batch_us: f64,
    pub incremental_us: f64,
    pub speedup: f64,
    pub results_equal: bool,
    pub fingerprint: String,
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("generating system n={n} m={m}: {source}")]
    Generation { n: usize, m: usize, source: ModelError },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("incremental and batch results differ at n={n} m={m} kind={kind} (system {fingerprint}): incremental {incremental:?}, batch {batch:?}")]
    Mismatch {
        n: usize,
        m: usize,
        kind: &'static str,
        fingerprint: String,
        incremental: Vec<String>,
        batch: Vec<String>,
    },
    #[error("config: {0}")]
    Config(String),
}

fn point_seed(seed: u64, n: usize, m: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((n as u64) << 32) ^ (m as u64));
    rng.gen()
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let k = xs.len();
    if k % 2 == 1 {
        xs[k / 2]
    } else {
        (xs[k / 2 - 1] + xs[k / 2]) / 2.0
    }
}

/// Runs `f` once to warm up, then `trials` times; returns the median
/// wall-clock time in microseconds and the last result.
fn time<T>(trials: usize, mut f: impl FnMut() -> Result<T, EngineError>) -> Result<(f64, T), EngineError> {
    let mut last = f()?;
    let mut samples = Vec::with_capacity(trials);
    for _ in 0..trials {
        let t = Instant::now();
        last = f()?;
        samples.push(t.elapsed().as_secs_f64() * 1e6);
    }
    Ok((median(samples), last))
}

/// One grid point. The system depends only on `(seed, n, m)`, so add and
/// delete rows at the same point share it.
pub fn bench_point(
    config: &BenchConfig,
    engine: &Engine,
    n: usize,
    m: usize,
    kind: UpdateKind,
) -> Result<BenchRow, BenchError> {
    let mut rng = ChaCha8Rng::seed_from_u64(point_seed(config.seed, n, m));
    let gen_err = |source| BenchError::Generation { n, m, source };
    let system = generate_system(&mut rng, n, m, &config.generator).map_err(gen_err)?;
    let extra = generate_covering(&mut rng, "NEW", n, &config.generator).map_err(gen_err)?;
    let victim = format!("C{}", rng.gen_range(1..=m));
    let fingerprint = system.fingerprint().to_hex()[..16].to_string();
    let cache = engine.batch_reducts(&system)?;
    let trials = config.trials.max(1);

    let (incremental_us, outcome) = match kind {
        UpdateKind::Add => time(trials, || engine.add_covering(&system, &cache, extra.clone()))?,
        UpdateKind::Delete => time(trials, || engine.delete_covering(&system, &cache, &victim))?,
    };
    let updated = outcome.system.clone();
    let (batch_us, batch) = time(trials, || engine.batch_reducts(&updated))?;

    let results_equal = outcome.cache.reducts == batch.reducts;
    if !results_equal {
        let names = updated.names();
        let lines = |r: &ReductSet| r.lines(&names);
        return Err(BenchError::Mismatch {
            n,
            m,
            kind: kind.as_str(),
            fingerprint,
            incremental: lines(&outcome.cache.reducts),
            batch: lines(&batch.reducts),
        });
    }
    info!(
        "n={n} m={m} {}: {} reducts, batch {batch_us:.0}us, incremental {incremental_us:.0}us ({:?})",
        kind.as_str(),
        batch.reducts.len(),
        outcome.report.path
    );
    Ok(BenchRow {
        n,
        m,
        update_kind: kind,
        batch_us,
        incremental_us,
        speedup: batch_us / incremental_us.max(1e-3),
        results_equal,
        fingerprint,
    })
}

pub fn run_bench(config: &BenchConfig, engine: &Engine) -> Result<Vec<BenchRow>, BenchError> {
    if config.universe_sizes.is_empty() || config.covering_counts.is_empty() {
        return Err(BenchError::Config("universe_sizes and covering_counts must be non-empty".into()));
    }
    if config.covering_counts.iter().any(|&m| m < 2) {
        return Err(BenchError::Config("covering counts must be at least 2".into()));
    }
    let mut rows = Vec::new();
    for &n in &config.universe_sizes {
        for &m in &config.covering_counts {
            for &kind in &config.update_kinds {
                rows.push(bench_point(config, engine, n, m, kind)?);
            }
        }
    }
    Ok(rows)
}

pub fn rows_to_csv(rows: &[BenchRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).expect("rows serialize");
    }
    String::from_utf8(w.into_inner().expect("in-memory writer")).expect("csv is utf-8")
}
