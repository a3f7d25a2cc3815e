//! Batch and incremental reduct computation.
//!
//! The batch path builds the related family from scratch and expands its CNF.
//! The incremental paths start from a [`ReductionCache`] of the system before
//! the change and only look at the added or deleted covering's blocks:
//!
//! * add, positive region unchanged: old reducts survive; new ones are the
//!   minimal hitting sets of `{new} ∪ {r(x) | x ∈ POS, x ∉ ∪𝒜_new}` that do
//!   not strictly extend an old reduct.
//! * add, positive region grew: every reduct must contain the new covering,
//!   and the reducts are exactly the minimal hitting sets of the same family.
//! * delete, positive region unchanged: old reducts not using the covering.
//! * delete, positive region shrank: old reducts minus the covering, verified
//!   against `r⁻` and re-minimized if any candidate fails.

use std::collections::HashSet;

use log::{debug, info};
use thiserror::Error;

use crate::approximation::{third_lower, Consistency};
use crate::block::Block;
use crate::coverset::CoverSet;
use crate::minimizer::{absorb, filter_non_extensions, is_antichain, Keep, MinimizeError, Minimizer, MonotoneFormula};
use crate::model::{Covering, CoveringDecisionSystem, DecisionPartition, Fingerprint, ModelError};
use crate::related::{covering_admissible, related_function, related_sets, RelatedFamily};

pub const DEFAULT_ORACLE_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Minimize(#[from] MinimizeError),
    #[error("cache belongs to system {cached}, not {actual}")]
    StaleCache { cached: String, actual: String },
    #[error("unknown covering `{0}`")]
    UnknownCovering(String),
    #[error("cannot delete `{0}`: it is the only covering")]
    LastCovering(String),
    #[error("oracle enumeration supports at most {limit} coverings, system has {count}")]
    TooManyCoverings { count: usize, limit: usize },
}

/// An antichain of covering index sets, sorted lexicographically by index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ReductSet {
    reducts: Vec<CoverSet>,
}

impl ReductSet {
    /// Normalizes `sets` (deduplicate, absorb supersets, sort).
    pub fn new(sets: &[CoverSet]) -> Self {
        ReductSet {
            reducts: absorb(sets, Keep::Minimal),
        }
    }

    pub fn as_slice(&self) -> &[CoverSet] {
        &self.reducts
    }

    pub fn len(&self) -> usize {
        self.reducts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reducts.is_empty()
    }

    pub fn contains(&self, set: CoverSet) -> bool {
        self.reducts.binary_search(&set).is_ok()
    }

    /// One comma-separated name list per reduct, sorted as strings.
    pub fn lines(&self, names: &[String]) -> Vec<String> {
        let mut lines: Vec<String> = self
            .reducts
            .iter()
            .map(|r| {
                r.iter()
                    .map(|i| names[i].as_str())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect();
        lines.sort();
        lines
    }
}

/// State of a system snapshot reused by the incremental paths.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionCache {
    pub fingerprint: Fingerprint,
    pub names: Vec<String>,
    pub related: RelatedFamily,
    /// Lower approximation of each decision class.
    pub lower: Vec<Block>,
    pub positive: Block,
    pub reducts: ReductSet,
    pub consistency: Consistency,
}

impl ReductionCache {
    pub fn universe(&self) -> usize {
        self.related.universe()
    }

    fn check(&self, system: &CoveringDecisionSystem) -> Result<(), EngineError> {
        if self.fingerprint != system.fingerprint() {
            return Err(EngineError::StaleCache {
                cached: self.fingerprint.to_hex(),
                actual: system.fingerprint().to_hex(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UpdateKind {
    AddCovering(Covering),
    DeleteCovering { name: String, index: usize },
}

/// A pending change together with the admissible blocks of the covering it
/// adds or removes.
#[derive(Clone, Debug)]
pub struct UpdateDelta {
    pub kind: UpdateKind,
    pub admissible: Vec<Block>,
    pub admissible_union: Block,
}

impl UpdateDelta {
    pub fn add(decision: &DecisionPartition, covering: Covering) -> Result<Self, EngineError> {
        if covering.universe() != decision.universe() {
            return Err(ModelError::UniverseMismatch {
                expected: decision.universe(),
                found: covering.universe(),
            }
            .into());
        }
        let (admissible, admissible_union) = covering_admissible(&covering, decision);
        Ok(UpdateDelta {
            kind: UpdateKind::AddCovering(covering),
            admissible,
            admissible_union,
        })
    }

    pub fn delete(system: &CoveringDecisionSystem, name: &str) -> Result<Self, EngineError> {
        let index = system
            .index_of(name)
            .ok_or_else(|| EngineError::UnknownCovering(name.to_string()))?;
        let (admissible, admissible_union) = covering_admissible(system.covering(index), system.decision());
        Ok(UpdateDelta {
            kind: UpdateKind::DeleteCovering {
                name: name.to_string(),
                index,
            },
            admissible,
            admissible_union,
        })
    }
}

/// Which rule produced an incremental result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdatePath {
    /// Consistent base, covering added.
    AddConsistent,
    /// Inconsistent base, positive region unchanged.
    AddPositiveUnchanged,
    /// Inconsistent base, positive region grew.
    AddPositiveGrew,
    /// Positive region unchanged by the deletion.
    DeletePositiveUnchanged,
    /// Positive region shrank.
    DeletePositiveShrank,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UpdateReport {
    pub path: UpdatePath,
    pub base: Consistency,
    /// The difference rule on deletion produced a candidate that failed
    /// verification, so the reducts were re-minimized from `r⁻`.
    pub repaired: bool,
    /// On a growing add: whether `{R ∪ {new}}` over the old reducts would have
    /// given a different answer.
    pub union_rule_diverged: bool,
    /// On an add: the reducts that contain the new covering, i.e. the terms of
    /// the incremental function that survive the non-extension filter.
    pub added: Vec<CoverSet>,
}

#[derive(Clone, Debug)]
pub struct UpdateOutcome {
    pub system: CoveringDecisionSystem,
    pub cache: ReductionCache,
    pub report: UpdateReport,
}

impl UpdateOutcome {
    pub fn reducts(&self) -> &ReductSet {
        &self.cache.reducts
    }
}

fn lower_approximations(system: &CoveringDecisionSystem) -> (Vec<Block>, Block) {
    let n = system.universe_size();
    let decision = system.decision();
    let mut lower = vec![Block::empty(n); decision.classes().len()];
    for c in system.coverings() {
        for b in c.blocks() {
            if let Some(ci) = decision.class_containing(b) {
                lower[ci].union_with(b);
            }
        }
    }
    let mut positive = Block::empty(n);
    for l in &lower {
        positive.union_with(l);
    }
    (lower, positive)
}

/// `r⁺` after adding the covering described by `delta`, which takes the next
/// free index.
pub fn update_related_add(cache: &ReductionCache, delta: &UpdateDelta) -> Result<RelatedFamily, EngineError> {
    let n = cache.universe();
    if delta.admissible_union.universe() != n {
        return Err(ModelError::UniverseMismatch {
            expected: n,
            found: delta.admissible_union.universe(),
        }
        .into());
    }
    let new_index = cache.names.len();
    let mut r = cache.related.r.clone();
    let mut nonempty = cache.related.nonempty_objects.clone();
    for x in delta.admissible_union.iter() {
        r[x].insert(new_index);
    }
    nonempty.union_with(&delta.admissible_union);
    Ok(RelatedFamily {
        r,
        nonempty_objects: nonempty,
    })
}

/// `r⁻` after deleting the covering in `delta`; higher indices shift down.
pub fn update_related_delete(cache: &ReductionCache, delta: &UpdateDelta) -> Result<RelatedFamily, EngineError> {
    let UpdateKind::DeleteCovering { index, ref name } = delta.kind else {
        panic!("update_related_delete called with an add delta");
    };
    if cache.names.get(index).map(String::as_str) != Some(name.as_str()) {
        return Err(EngineError::UnknownCovering(name.clone()));
    }
    if cache.names.len() == 1 {
        return Err(EngineError::LastCovering(name.clone()));
    }
    let r = cache
        .related
        .r
        .iter()
        .map(|s| s.remove_index(index))
        .collect();
    Ok(RelatedFamily::from_sets(r))
}

/// Distinct related sets of the objects in `objects`.
fn related_family_over(related: &RelatedFamily, objects: &Block) -> Vec<CoverSet> {
    let mut seen = HashSet::new();
    objects
        .iter()
        .map(|x| related.r[x])
        .filter(|s| seen.insert(*s))
        .collect()
}

fn is_minimal_transversal(t: CoverSet, clauses: &[CoverSet]) -> bool {
    let hits = |s: CoverSet| clauses.iter().all(|c| c.intersects(s));
    hits(t) && t.iter().all(|e| !hits(t.without(e)))
}

#[derive(Clone, Copy, Debug)]
pub struct Engine {
    pub minimizer: Minimizer,
    pub oracle_limit: usize,
}

impl Default for Engine {
    fn default() -> Self {
        Engine {
            minimizer: Minimizer::default(),
            oracle_limit: DEFAULT_ORACLE_LIMIT,
        }
    }
}

impl Engine {
    /// Positive region, related family, related function, reduced
    /// disjunctive form.
    pub fn batch_reducts(&self, system: &CoveringDecisionSystem) -> Result<ReductionCache, EngineError> {
        let (lower, positive) = lower_approximations(system);
        let related = related_sets(system);
        let cnf = related_function(&related);
        let dnf = self.minimizer.minimal_dnf(&cnf)?;
        Ok(ReductionCache {
            fingerprint: system.fingerprint(),
            names: system.names(),
            consistency: Consistency::from_positive(&positive),
            related,
            lower,
            positive,
            reducts: ReductSet::new(dnf.terms()),
        })
    }

    pub fn add_covering(
        &self,
        system: &CoveringDecisionSystem,
        cache: &ReductionCache,
        covering: Covering,
    ) -> Result<UpdateOutcome, EngineError> {
        cache.check(system)?;
        let new_system = system.with_covering(covering.clone())?;
        let delta = UpdateDelta::add(system.decision(), covering)?;
        let new_index = system.num_coverings();
        let related = update_related_add(cache, &delta)?;

        let mut lower = cache.lower.clone();
        for b in &delta.admissible {
            let ci = system.decision().class_containing(b).expect("admissible");
            lower[ci].union_with(b);
        }
        let positive = cache.positive.union(&delta.admissible_union);
        let grew = positive != cache.positive;

        // {new} ∧ ⋀ { ⋁ r(x) | x ∈ POS, x ∉ ∪𝒜_new }
        let rest = cache.positive.difference(&delta.admissible_union);
        let mut clauses = related_family_over(&cache.related, &rest);
        clauses.push(CoverSet::singleton(new_index));
        let candidates = self.minimizer.transversals(&clauses)?;

        let old = cache.reducts.as_slice();
        let mut union_rule_diverged = false;
        let (reducts, path, added) = if !grew {
            let added = filter_non_extensions(&candidates, old);
            let mut all = old.to_vec();
            all.extend(added.iter().copied());
            let path = if cache.consistency.is_consistent() {
                UpdatePath::AddConsistent
            } else {
                UpdatePath::AddPositiveUnchanged
            };
            (ReductSet::new(&all), path, added)
        } else {
            // Objects newly in the positive region have r⁺(x) = {new}, so no old
            // reduct survives and every new one holds the covering.
            let exact = ReductSet::new(&candidates);
            let extended: Vec<CoverSet> = old.iter().map(|r| r.with(new_index)).collect();
            if ReductSet::new(&extended) != exact {
                union_rule_diverged = true;
                debug!("growing add: reducts ∪ {{new}} differs from the exact result");
            }
            let added = exact.as_slice().to_vec();
            (exact, UpdatePath::AddPositiveGrew, added)
        };

        let mut names = cache.names.clone();
        names.push(new_system.covering(new_index).name().to_string());
        let consistency = Consistency::from_positive(&positive);
        Ok(UpdateOutcome {
            cache: ReductionCache {
                fingerprint: new_system.fingerprint(),
                names,
                related,
                lower,
                positive,
                reducts,
                consistency,
            },
            system: new_system,
            report: UpdateReport {
                path,
                base: cache.consistency,
                repaired: false,
                union_rule_diverged,
                added,
            },
        })
    }

    pub fn delete_covering(
        &self,
        system: &CoveringDecisionSystem,
        cache: &ReductionCache,
        name: &str,
    ) -> Result<UpdateOutcome, EngineError> {
        cache.check(system)?;
        let delta = UpdateDelta::delete(system, name)?;
        let related = update_related_delete(cache, &delta)?;
        let UpdateKind::DeleteCovering { index, .. } = delta.kind else {
            unreachable!()
        };
        let new_system = system
            .without_covering(index)
            .ok_or_else(|| EngineError::LastCovering(name.to_string()))?;

        let (lower, positive) = lower_approximations(&new_system);
        let old = cache.reducts.as_slice();
        let mut repaired = false;
        let (reducts, path) = if positive == cache.positive {
            let kept: Vec<CoverSet> = old
                .iter()
                .filter(|r| !r.contains(index))
                .map(|r| r.remove_index(index))
                .collect();
            (ReductSet::new(&kept), UpdatePath::DeletePositiveUnchanged)
        } else {
            let stripped: Vec<CoverSet> = old.iter().map(|r| r.without(index).remove_index(index)).collect();
            let candidates = ReductSet::new(&stripped);
            let clauses = related.family();
            let verified = candidates
                .as_slice()
                .iter()
                .all(|&t| is_minimal_transversal(t, &clauses));
            if verified {
                (candidates, UpdatePath::DeletePositiveShrank)
            } else {
                info!("deleting `{name}`: difference rule failed verification, re-minimizing");
                repaired = true;
                let dnf = self.minimizer.minimal_dnf(&MonotoneFormula::cnf(clauses))?;
                (ReductSet::new(dnf.terms()), UpdatePath::DeletePositiveShrank)
            }
        };

        Ok(UpdateOutcome {
            cache: ReductionCache {
                fingerprint: new_system.fingerprint(),
                names: new_system.names(),
                related,
                consistency: Consistency::from_positive(&positive),
                lower,
                positive,
                reducts,
            },
            system: new_system,
            report: UpdateReport {
                path,
                base: cache.consistency,
                repaired,
                union_rule_diverged: false,
                added: Vec::new(),
            },
        })
    }

    /// Reducts straight from the definition: every subfamily `P ⊆ Δ` whose
    /// blocks give the same positive region as `Δ`, keeping the minimal ones.
    /// The empty subfamily takes part, so a system with an empty positive
    /// region has the single reduct `∅`.
    pub fn oracle_reducts(&self, system: &CoveringDecisionSystem) -> Result<ReductSet, EngineError> {
        let m = system.num_coverings();
        if m > self.oracle_limit {
            return Err(EngineError::TooManyCoverings {
                count: m,
                limit: self.oracle_limit,
            });
        }
        let classes = system.decision().classes();
        let positive_of = |p: CoverSet| {
            let blocks: Vec<&Block> = p.iter().flat_map(|i| system.covering(i).blocks()).collect();
            let mut pos = Block::empty(system.universe_size());
            for d in classes {
                pos.union_with(&third_lower(blocks.iter().copied(), d));
            }
            pos
        };
        let target = positive_of(system.all());
        let mut subsets: Vec<CoverSet> = (0u128..(1u128 << m)).map(CoverSet::from_bits).collect();
        subsets.sort_by_key(|s| s.len());
        let mut found: Vec<CoverSet> = Vec::new();
        for p in subsets {
            if found.iter().any(|f| f.is_subset(p)) {
                continue;
            }
            if positive_of(p) == target {
                found.push(p);
            }
        }
        Ok(ReductSet::new(&found))
    }
}

pub fn batch_reducts(system: &CoveringDecisionSystem) -> Result<ReductionCache, EngineError> {
    Engine::default().batch_reducts(system)
}

pub fn add_covering(
    system: &CoveringDecisionSystem,
    cache: &ReductionCache,
    covering: Covering,
) -> Result<UpdateOutcome, EngineError> {
    Engine::default().add_covering(system, cache, covering)
}

pub fn delete_covering(
    system: &CoveringDecisionSystem,
    cache: &ReductionCache,
    name: &str,
) -> Result<UpdateOutcome, EngineError> {
    Engine::default().delete_covering(system, cache, name)
}

pub fn oracle_reducts(system: &CoveringDecisionSystem) -> Result<ReductSet, EngineError> {
    Engine::default().oracle_reducts(system)
}

/// Checks a reduct set against the definition directly: antichain, each
/// reduct keeps the positive region, and no covering in a reduct can be
/// dropped. Returns a description of the first violation.
pub fn check_reduct_invariants(system: &CoveringDecisionSystem, reducts: &ReductSet) -> Result<(), String> {
    if !is_antichain(reducts.as_slice()) {
        return Err("reduct set is not an antichain".into());
    }
    let classes = system.decision().classes();
    let positive_of = |p: CoverSet| {
        let mut pos = Block::empty(system.universe_size());
        for i in p.iter() {
            for b in system.covering(i).blocks() {
                if classes.iter().any(|d| b.is_subset(d)) {
                    pos.union_with(b);
                }
            }
        }
        pos
    };
    let full = positive_of(system.all());
    for &r in reducts.as_slice() {
        if positive_of(r) != full {
            return Err(format!("{} does not preserve the positive region", system.format_set(r)));
        }
        for e in r.iter() {
            if positive_of(r.without(e)) == full {
                return Err(format!(
                    "{} is dispensable in {}",
                    system.covering(e).name(),
                    system.format_set(r)
                ));
            }
        }
    }
    Ok(())
}
