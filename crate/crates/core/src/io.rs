//! System, covering and cache documents, and coverization of CSV tables.
//!
//! Object indices are 0-based on the wire.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::approximation::Consistency;
use crate::block::Block;
use crate::coverset::CoverSet;
use crate::engine::{ReductSet, ReductionCache};
use crate::model::{build_system, Covering, CoveringDecisionSystem, Fingerprint, ModelError};
use crate::related::RelatedFamily;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IoError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("object_names has {found} entries for a universe of {expected}")]
    ObjectNameCount { expected: usize, found: usize },
    #[error("cache document is inconsistent: {0}")]
    InvalidCache(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error("column `{0}` not found in table header")]
    UnknownColumn(String),
    #[error("column `{column}` row {row}: `{value}` is not a finite number")]
    NonNumericForTolerance { column: String, row: usize, value: String },
    #[error("column `{column}`: tolerance epsilon {epsilon} is outside (0, 1]")]
    InvalidEpsilon { column: String, epsilon: f64 },
    #[error("table has no rows")]
    EmptyTable,
    #[error("table has no condition columns")]
    NoConditionColumns,
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringDocument {
    pub name: String,
    pub blocks: Vec<Vec<usize>>,
}

impl CoveringDocument {
    pub fn from_covering(c: &Covering) -> Self {
        let mut blocks: Vec<Vec<usize>> = c.blocks().iter().map(Block::to_indices).collect();
        blocks.sort();
        CoveringDocument {
            name: c.name().to_string(),
            blocks,
        }
    }

    pub fn into_covering(self, universe: usize) -> Result<Covering, ModelError> {
        Covering::from_lists(self.name, universe, &self.blocks)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDocument {
    pub universe_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub object_names: Option<Vec<String>>,
    pub coverings: Vec<CoveringDocument>,
    pub decision: Vec<Vec<usize>>,
}

impl SystemDocument {
    /// Canonical document for `system`: indices ascending inside each block,
    /// blocks and decision classes in lexicographic order, coverings in
    /// declaration order.
    pub fn from_system(system: &CoveringDecisionSystem) -> Self {
        let mut decision: Vec<Vec<usize>> = system.decision().classes().iter().map(Block::to_indices).collect();
        decision.sort();
        SystemDocument {
            universe_size: system.universe_size(),
            object_names: None,
            coverings: system.coverings().map(CoveringDocument::from_covering).collect(),
            decision,
        }
    }

    /// Same document with every list put in canonical order.
    pub fn canonical(mut self) -> Self {
        for c in &mut self.coverings {
            for b in &mut c.blocks {
                b.sort_unstable();
            }
            c.blocks.sort();
        }
        for d in &mut self.decision {
            d.sort_unstable();
        }
        self.decision.sort();
        self
    }

    pub fn to_system(&self) -> Result<CoveringDecisionSystem, IoError> {
        if let Some(names) = &self.object_names {
            if names.len() != self.universe_size {
                return Err(IoError::ObjectNameCount {
                    expected: self.universe_size,
                    found: names.len(),
                });
            }
        }
        let coverings: Vec<(String, Vec<Vec<usize>>)> = self
            .coverings
            .iter()
            .map(|c| (c.name.clone(), c.blocks.clone()))
            .collect();
        Ok(build_system(self.universe_size, &coverings, &self.decision)?)
    }
}

pub fn parse_document(text: &str) -> Result<SystemDocument, IoError> {
    Ok(serde_json::from_str(text)?)
}

pub fn load_system(text: &str) -> Result<CoveringDecisionSystem, IoError> {
    parse_document(text)?.to_system()
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

fn index_lists(lists: &[Vec<usize>]) -> String {
    let inner: Vec<String> = lists
        .iter()
        .map(|l| {
            let xs: Vec<String> = l.iter().map(usize::to_string).collect();
            format!("[{}]", xs.join(","))
        })
        .collect();
    format!("[{}]", inner.join(","))
}

/// Writes `doc` as given, one covering per line. Pass a canonical document
/// to get byte-stable output.
pub fn serialize_document(doc: &SystemDocument) -> String {
    let mut out = String::from("{\n");
    let _ = writeln!(out, "  \"universe_size\": {},", doc.universe_size);
    if let Some(names) = &doc.object_names {
        let names: Vec<String> = names.iter().map(|n| json_str(n)).collect();
        let _ = writeln!(out, "  \"object_names\": [{}],", names.join(", "));
    }
    out.push_str("  \"coverings\": [\n");
    for (i, c) in doc.coverings.iter().enumerate() {
        let sep = if i + 1 < doc.coverings.len() { "," } else { "" };
        let _ = writeln!(
            out,
            "    {{\"name\": {}, \"blocks\": {}}}{sep}",
            json_str(&c.name),
            index_lists(&c.blocks)
        );
    }
    out.push_str("  ],\n");
    let _ = writeln!(out, "  \"decision\": {}", index_lists(&doc.decision));
    out.push_str("}\n");
    out
}

pub fn serialize_system(system: &CoveringDecisionSystem) -> String {
    serialize_document(&SystemDocument::from_system(system))
}

pub fn parse_covering(text: &str, universe: usize) -> Result<Covering, IoError> {
    let doc: CoveringDocument = serde_json::from_str(text)?;
    Ok(doc.into_covering(universe)?)
}

pub fn serialize_covering(c: &Covering) -> String {
    let doc = CoveringDocument::from_covering(c);
    format!("{{\"name\": {}, \"blocks\": {}}}\n", json_str(&doc.name), index_lists(&doc.blocks))
}

/// On-disk form of a [`ReductionCache`]. Covering sets are stored by name.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CacheDocument {
    pub fingerprint: String,
    pub universe_size: usize,
    pub coverings: Vec<String>,
    pub consistent: bool,
    pub positive: Vec<usize>,
    pub lower: Vec<Vec<usize>>,
    pub related: Vec<Vec<String>>,
    pub reducts: Vec<Vec<String>>,
}

fn names_of(set: CoverSet, names: &[String]) -> Vec<String> {
    set.iter().map(|i| names[i].clone()).collect()
}

impl CacheDocument {
    pub fn from_cache(cache: &ReductionCache) -> Self {
        let names = &cache.names;
        CacheDocument {
            fingerprint: cache.fingerprint.to_hex(),
            universe_size: cache.universe(),
            coverings: names.clone(),
            consistent: cache.consistency.is_consistent(),
            positive: cache.positive.to_indices(),
            lower: cache.lower.iter().map(Block::to_indices).collect(),
            related: cache.related.r.iter().map(|&s| names_of(s, names)).collect(),
            reducts: cache.reducts.as_slice().iter().map(|&s| names_of(s, names)).collect(),
        }
    }

    pub fn to_cache(&self) -> Result<ReductionCache, IoError> {
        let bad = |m: String| IoError::InvalidCache(m);
        let n = self.universe_size;
        let fingerprint = Fingerprint::from_hex(&self.fingerprint).ok_or_else(|| bad("malformed fingerprint".into()))?;
        let index: HashMap<&str, usize> = self
            .coverings
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        if index.len() != self.coverings.len() {
            return Err(bad("duplicate covering name".into()));
        }
        let to_set = |names: &[String]| -> Result<CoverSet, IoError> {
            names
                .iter()
                .map(|s| index.get(s.as_str()).copied().ok_or_else(|| bad(format!("unknown covering `{s}`"))))
                .collect::<Result<Vec<_>, _>>()
                .map(CoverSet::from_indices)
        };
        let to_block = |xs: &[usize]| {
            Block::from_indices(n, xs.iter().copied()).map_err(|i| bad(format!("object {i} out of range")))
        };
        if self.related.len() != n {
            return Err(bad(format!("{} related sets for {n} objects", self.related.len())));
        }
        let related = RelatedFamily::from_sets(self.related.iter().map(|r| to_set(r)).collect::<Result<_, _>>()?);
        let positive = to_block(&self.positive)?;
        if positive != related.nonempty_objects {
            return Err(bad("positive region disagrees with related sets".into()));
        }
        let consistency = Consistency::from_positive(&positive);
        if consistency.is_consistent() != self.consistent {
            return Err(bad("consistency flag disagrees with positive region".into()));
        }
        let lower = self.lower.iter().map(|l| to_block(l)).collect::<Result<Vec<_>, _>>()?;
        let reducts: Vec<CoverSet> = self.reducts.iter().map(|r| to_set(r)).collect::<Result<_, _>>()?;
        Ok(ReductionCache {
            fingerprint,
            names: self.coverings.clone(),
            related,
            lower,
            positive,
            reducts: ReductSet::new(&reducts),
            consistency,
        })
    }
}

pub fn serialize_cache(cache: &ReductionCache) -> String {
    let mut s = serde_json::to_string_pretty(&CacheDocument::from_cache(cache)).expect("cache serializes");
    s.push('\n');
    s
}

pub fn load_cache(text: &str) -> Result<ReductionCache, IoError> {
    let doc: CacheDocument = serde_json::from_str(text)?;
    doc.to_cache()
}

/// How a condition column becomes a covering.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum ColumnRule {
    /// One block per distinct value.
    #[default]
    Categorical,
    /// For each object x, the block `{y : |a(x) − a(y)| ≤ ε·range}`.
    Tolerance { epsilon: f64 },
    /// Column is not turned into a covering.
    Ignore,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverizationSpec {
    pub decision_column: String,
    /// Rule for columns not listed in `columns`.
    #[serde(default)]
    pub default: ColumnRule,
    #[serde(default)]
    pub columns: BTreeMap<String, ColumnRule>,
}

impl CoverizationSpec {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// A CSV table with a header row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn parse_csv(text: &str) -> Result<Self, IoError> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = reader
            .headers()
            .map_err(|e| IoError::Csv(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let rows = reader
            .records()
            .map(|r| r.map(|rec| rec.iter().map(str::to_string).collect()))
            .collect::<Result<Vec<Vec<String>>, _>>()
            .map_err(|e| IoError::Csv(e.to_string()))?;
        Ok(Table { headers, rows })
    }

    fn column(&self, name: &str) -> Result<usize, IoError> {
        self.headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IoError::UnknownColumn(name.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoverizeWarning {
    /// A tolerance column with zero range; it yields the single block `U`.
    ConstantColumn(String),
}

#[derive(Clone, Debug)]
pub struct Coverized {
    pub system: CoveringDecisionSystem,
    pub warnings: Vec<CoverizeWarning>,
}

fn categorical_blocks(values: impl Iterator<Item = String>) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut seen: HashMap<String, usize> = HashMap::new();
    for (x, v) in values.enumerate() {
        let g = *seen.entry(v).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(x);
    }
    groups
}

/// Tolerance blocks of a numeric column, or `None` if the column is constant.
pub fn tolerance_blocks(values: &[f64], epsilon: f64) -> Option<Vec<Vec<usize>>> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    if range <= 0.0 {
        return None;
    }
    let threshold = epsilon * range;
    let blocks: BTreeSet<Vec<usize>> = values
        .iter()
        .map(|&a| {
            values
                .iter()
                .enumerate()
                .filter(|&(_, &b)| (a - b).abs() <= threshold)
                .map(|(y, _)| y)
                .collect()
        })
        .collect();
    Some(blocks.into_iter().collect())
}

/// One covering per condition column, decision classes from the decision
/// column. Output is deterministic for a given table and spec.
pub fn coverize(table: &Table, spec: &CoverizationSpec) -> Result<Coverized, IoError> {
    if table.rows.is_empty() {
        return Err(IoError::EmptyTable);
    }
    for (i, row) in table.rows.iter().enumerate() {
        if row.len() != table.headers.len() {
            return Err(IoError::Csv(format!(
                "row {} has {} fields, header has {}",
                i + 1,
                row.len(),
                table.headers.len()
            )));
        }
    }
    for name in spec.columns.keys() {
        table.column(name)?;
    }
    let n = table.rows.len();
    let dcol = table.column(&spec.decision_column)?;
    let decision = categorical_blocks(table.rows.iter().map(|r| r[dcol].clone()));

    let mut warnings = Vec::new();
    let mut coverings = Vec::new();
    for (col, header) in table.headers.iter().enumerate() {
        if col == dcol {
            continue;
        }
        let rule = spec.columns.get(header).copied().unwrap_or(spec.default);
        let blocks = match rule {
            ColumnRule::Ignore => continue,
            ColumnRule::Categorical => categorical_blocks(table.rows.iter().map(|r| r[col].clone())),
            ColumnRule::Tolerance { epsilon } => {
                if !(epsilon > 0.0 && epsilon <= 1.0) {
                    return Err(IoError::InvalidEpsilon {
                        column: header.clone(),
                        epsilon,
                    });
                }
                let values = table
                    .rows
                    .iter()
                    .enumerate()
                    .map(|(row, r)| match r[col].parse::<f64>() {
                        Ok(v) if v.is_finite() => Ok(v),
                        _ => Err(IoError::NonNumericForTolerance {
                            column: header.clone(),
                            row: row + 1,
                            value: r[col].clone(),
                        }),
                    })
                    .collect::<Result<Vec<f64>, _>>()?;
                tolerance_blocks(&values, epsilon).unwrap_or_else(|| {
                    warnings.push(CoverizeWarning::ConstantColumn(header.clone()));
                    vec![(0..n).collect()]
                })
            }
        };
        coverings.push((header.clone(), blocks));
    }
    if coverings.is_empty() {
        return Err(IoError::NoConditionColumns);
    }
    let system = build_system(n, &coverings, &decision)?;
    Ok(Coverized { system, warnings })
}
