//! Universe, coverings, decision partitions and the validated system triple.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::block::Block;
use crate::coverset::{CoverSet, MAX_COVERINGS};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("covering `{covering}`: block #{block} is empty")]
    EmptyBlock { covering: String, block: usize },
    #[error("covering `{covering}` does not cover the universe (first uncovered object: {first_missing})")]
    CoverageGap {
        covering: String,
        first_missing: usize,
    },
    #[error("covering `{covering}`: block #{block} duplicates block #{first}")]
    DuplicateBlock {
        covering: String,
        block: usize,
        first: usize,
    },
    #[error("decision is not a partition of the universe: {0}")]
    DecisionNotPartition(String),
    #[error("duplicate covering name `{0}`")]
    DuplicateCoveringName(String),
    #[error("{context}: index {index} out of range for universe of size {universe}")]
    IndexOutOfRange {
        context: String,
        index: usize,
        universe: usize,
    },
    #[error("a system needs at least one covering")]
    NoCoverings,
    #[error("{count} coverings exceed the supported maximum of {max}")]
    TooManyCoverings { count: usize, max: usize },
    #[error("universe mismatch: system has {expected} objects, got {found}")]
    UniverseMismatch { expected: usize, found: usize },
}

/// A named covering of the universe: non-empty, pairwise distinct blocks whose
/// union is the whole universe.
#[derive(Clone, PartialEq, Eq)]
pub struct Covering {
    name: String,
    universe: usize,
    blocks: Vec<Block>,
    digest: [u8; 32],
}

impl Covering {
    pub fn new(name: impl Into<String>, universe: usize, blocks: Vec<Block>) -> Result<Self, ModelError> {
        let name = name.into();
        let mut union = Block::empty(universe);
        let mut seen: HashMap<&Block, usize> = HashMap::with_capacity(blocks.len());
        for (i, b) in blocks.iter().enumerate() {
            if b.universe() != universe {
                return Err(ModelError::UniverseMismatch {
                    expected: universe,
                    found: b.universe(),
                });
            }
            if b.is_empty() {
                return Err(ModelError::EmptyBlock {
                    covering: name,
                    block: i,
                });
            }
            if let Some(&first) = seen.get(b) {
                return Err(ModelError::DuplicateBlock {
                    covering: name,
                    block: i,
                    first,
                });
            }
            seen.insert(b, i);
            union.union_with(b);
        }
        if let Some(first_missing) = union.complement().first() {
            return Err(ModelError::CoverageGap {
                covering: name,
                first_missing,
            });
        }
        let digest = covering_digest(&name, universe, &blocks);
        Ok(Covering {
            name,
            universe,
            blocks,
            digest,
        })
    }

    /// Builds a covering from lists of member indices.
    pub fn from_lists(
        name: impl Into<String>,
        universe: usize,
        lists: &[Vec<usize>],
    ) -> Result<Self, ModelError> {
        let name = name.into();
        let blocks = lists
            .iter()
            .map(|l| {
                Block::from_indices(universe, l.iter().copied()).map_err(|index| {
                    ModelError::IndexOutOfRange {
                        context: format!("covering `{name}`"),
                        index,
                        universe,
                    }
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Covering::new(name, universe, blocks)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub(crate) fn digest(&self) -> &[u8; 32] {
        &self.digest
    }
}

impl fmt::Debug for Covering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Covering")
            .field("name", &self.name)
            .field("blocks", &self.blocks)
            .finish()
    }
}

// Order-insensitive in the blocks so that a canonicalized document and the
// original hash identically.
fn covering_digest(name: &str, universe: usize, blocks: &[Block]) -> [u8; 32] {
    let mut sorted: Vec<&Block> = blocks.iter().collect();
    sorted.sort();
    let mut h = Sha256::new();
    h.update((name.len() as u64).to_le_bytes());
    h.update(name.as_bytes());
    h.update((universe as u64).to_le_bytes());
    h.update((sorted.len() as u64).to_le_bytes());
    for b in sorted {
        for w in b.words() {
            h.update(w.to_le_bytes());
        }
    }
    h.finalize().into()
}

/// The decision classes `U/D`.
#[derive(Clone, PartialEq, Eq)]
pub struct DecisionPartition {
    classes: Vec<Block>,
    class_of: Vec<usize>,
}

impl DecisionPartition {
    pub fn new(universe: usize, classes: Vec<Block>) -> Result<Self, ModelError> {
        let mut class_of = vec![usize::MAX; universe];
        for (ci, c) in classes.iter().enumerate() {
            if c.universe() != universe {
                return Err(ModelError::UniverseMismatch {
                    expected: universe,
                    found: c.universe(),
                });
            }
            if c.is_empty() {
                return Err(ModelError::DecisionNotPartition(format!(
                    "class #{ci} is empty"
                )));
            }
            for x in c.iter() {
                if class_of[x] != usize::MAX {
                    return Err(ModelError::DecisionNotPartition(format!(
                        "object {x} lies in classes #{} and #{ci}",
                        class_of[x]
                    )));
                }
                class_of[x] = ci;
            }
        }
        if let Some(x) = class_of.iter().position(|&c| c == usize::MAX) {
            return Err(ModelError::DecisionNotPartition(format!(
                "object {x} lies in no class"
            )));
        }
        Ok(DecisionPartition { classes, class_of })
    }

    pub fn from_lists(universe: usize, lists: &[Vec<usize>]) -> Result<Self, ModelError> {
        let classes = lists
            .iter()
            .map(|l| {
                Block::from_indices(universe, l.iter().copied()).map_err(|index| {
                    ModelError::IndexOutOfRange {
                        context: "decision".to_string(),
                        index,
                        universe,
                    }
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        DecisionPartition::new(universe, classes)
    }

    pub fn classes(&self) -> &[Block] {
        &self.classes
    }

    pub fn universe(&self) -> usize {
        self.class_of.len()
    }

    /// Index of the class holding object `x`.
    pub fn class_of(&self, x: usize) -> usize {
        self.class_of[x]
    }

    /// The class containing `block`, if the block fits inside one.
    pub fn class_containing(&self, block: &Block) -> Option<usize> {
        let first = block.first()?;
        let ci = self.class_of[first];
        block.is_subset(&self.classes[ci]).then_some(ci)
    }

    fn digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update((self.class_of.len() as u64).to_le_bytes());
        // Class labels are arbitrary; hash the partition through a relabeling
        // by first occurrence.
        let mut relabel = vec![usize::MAX; self.classes.len()];
        let mut next = 0usize;
        for &c in &self.class_of {
            if relabel[c] == usize::MAX {
                relabel[c] = next;
                next += 1;
            }
            h.update((relabel[c] as u64).to_le_bytes());
        }
        h.finalize().into()
    }
}

impl fmt::Debug for DecisionPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.classes).finish()
    }
}

/// Stable identity of a system snapshot: universe size, covering names and
/// blocks (in declaration order) and the decision partition.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fingerprint(pub [u8; 32]);

impl Fingerprint {
    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        let bytes = hex::decode(s).ok()?;
        Some(Fingerprint(bytes.try_into().ok()?))
    }
}

impl fmt::Display for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for Fingerprint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fingerprint({})", &self.to_hex()[..12])
    }
}

/// A covering decision information system `(U, Δ, D)`.
///
/// Coverings are shared behind `Arc`, so deriving a system with one covering
/// added or removed does not copy the others.
#[derive(Clone)]
pub struct CoveringDecisionSystem {
    universe: usize,
    coverings: Vec<Arc<Covering>>,
    decision: Arc<DecisionPartition>,
    decision_digest: [u8; 32],
    fingerprint: Fingerprint,
}

impl CoveringDecisionSystem {
    pub fn new(
        universe: usize,
        coverings: Vec<Covering>,
        decision: DecisionPartition,
    ) -> Result<Self, ModelError> {
        let coverings = coverings.into_iter().map(Arc::new).collect();
        Self::from_parts(universe, coverings, Arc::new(decision))
    }

    fn from_parts(
        universe: usize,
        coverings: Vec<Arc<Covering>>,
        decision: Arc<DecisionPartition>,
    ) -> Result<Self, ModelError> {
        if coverings.is_empty() {
            return Err(ModelError::NoCoverings);
        }
        if coverings.len() > MAX_COVERINGS {
            return Err(ModelError::TooManyCoverings {
                count: coverings.len(),
                max: MAX_COVERINGS,
            });
        }
        if decision.class_of.len() != universe {
            return Err(ModelError::UniverseMismatch {
                expected: universe,
                found: decision.class_of.len(),
            });
        }
        let mut names = HashSet::with_capacity(coverings.len());
        for c in &coverings {
            if c.universe() != universe {
                return Err(ModelError::UniverseMismatch {
                    expected: universe,
                    found: c.universe(),
                });
            }
            if !names.insert(c.name()) {
                return Err(ModelError::DuplicateCoveringName(c.name().to_string()));
            }
        }
        let decision_digest = decision.digest();
        let fingerprint = system_fingerprint(universe, &coverings, &decision_digest);
        Ok(CoveringDecisionSystem {
            universe,
            coverings,
            decision,
            decision_digest,
            fingerprint,
        })
    }

    pub fn universe_size(&self) -> usize {
        self.universe
    }

    pub fn coverings(&self) -> impl ExactSizeIterator<Item = &Covering> + Clone {
        self.coverings.iter().map(|c| c.as_ref())
    }

    pub fn covering(&self, index: usize) -> &Covering {
        &self.coverings[index]
    }

    pub fn num_coverings(&self) -> usize {
        self.coverings.len()
    }

    pub fn decision(&self) -> &DecisionPartition {
        &self.decision
    }

    pub fn fingerprint(&self) -> Fingerprint {
        self.fingerprint
    }

    pub fn names(&self) -> Vec<String> {
        self.coverings.iter().map(|c| c.name().to_string()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.coverings.iter().position(|c| c.name() == name)
    }

    /// The full covering index set `Δ`.
    pub fn all(&self) -> CoverSet {
        CoverSet::from_indices(0..self.coverings.len())
    }

    /// `Δ⁺`: this system with `covering` appended.
    pub fn with_covering(&self, covering: Covering) -> Result<Self, ModelError> {
        let mut coverings = self.coverings.clone();
        coverings.push(Arc::new(covering));
        if coverings.len() > MAX_COVERINGS {
            return Err(ModelError::TooManyCoverings {
                count: coverings.len(),
                max: MAX_COVERINGS,
            });
        }
        let last = coverings.last().unwrap();
        if last.universe() != self.universe {
            return Err(ModelError::UniverseMismatch {
                expected: self.universe,
                found: last.universe(),
            });
        }
        if self.index_of(last.name()).is_some() {
            return Err(ModelError::DuplicateCoveringName(last.name().to_string()));
        }
        let fingerprint = system_fingerprint(self.universe, &coverings, &self.decision_digest);
        Ok(CoveringDecisionSystem {
            universe: self.universe,
            coverings,
            decision: Arc::clone(&self.decision),
            decision_digest: self.decision_digest,
            fingerprint,
        })
    }

    /// `Δ⁻`: this system without the covering at `index`. Returns `None` if
    /// that would leave no covering.
    pub fn without_covering(&self, index: usize) -> Option<Self> {
        if self.coverings.len() <= 1 || index >= self.coverings.len() {
            return None;
        }
        let mut coverings = self.coverings.clone();
        coverings.remove(index);
        let fingerprint = system_fingerprint(self.universe, &coverings, &self.decision_digest);
        Some(CoveringDecisionSystem {
            universe: self.universe,
            coverings,
            decision: Arc::clone(&self.decision),
            decision_digest: self.decision_digest,
            fingerprint,
        })
    }

    /// Renders a covering set as sorted, comma-separated names.
    pub fn format_set(&self, set: CoverSet) -> String {
        set.iter()
            .map(|i| self.coverings[i].name())
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Debug for CoveringDecisionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoveringDecisionSystem")
            .field("universe", &self.universe)
            .field("coverings", &self.coverings)
            .field("decision", &self.decision)
            .finish()
    }
}

fn system_fingerprint(
    universe: usize,
    coverings: &[Arc<Covering>],
    decision_digest: &[u8; 32],
) -> Fingerprint {
    let mut h = Sha256::new();
    h.update((universe as u64).to_le_bytes());
    h.update(decision_digest);
    h.update((coverings.len() as u64).to_le_bytes());
    for c in coverings {
        h.update(c.digest());
    }
    Fingerprint(h.finalize().into())
}

/// Validates and assembles a system from plain index lists.
pub fn build_system(
    universe_size: usize,
    coverings: &[(String, Vec<Vec<usize>>)],
    decision: &[Vec<usize>],
) -> Result<CoveringDecisionSystem, ModelError> {
    let decision = DecisionPartition::from_lists(universe_size, decision)?;
    let mut names = HashSet::new();
    let coverings = coverings
        .iter()
        .map(|(name, lists)| {
            if !names.insert(name.as_str()) {
                return Err(ModelError::DuplicateCoveringName(name.clone()));
            }
            Covering::from_lists(name.clone(), universe_size, lists)
        })
        .collect::<Result<Vec<_>, _>>()?;
    CoveringDecisionSystem::new(universe_size, coverings, decision)
}

/// A distinct block of `∪Δ` with the coverings that contain it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnionBlock {
    pub block: Block,
    pub contributors: CoverSet,
}

/// `∪Δ` with equal blocks from different coverings merged, in first-seen order.
pub fn union_of_coverings(system: &CoveringDecisionSystem) -> Vec<UnionBlock> {
    let mut out: Vec<UnionBlock> = Vec::new();
    let mut index: HashMap<&Block, usize> = HashMap::new();
    for (ci, c) in system.coverings().enumerate() {
        for b in c.blocks() {
            match index.get(b) {
                Some(&k) => out[k].contributors.insert(ci),
                None => {
                    index.insert(b, out.len());
                    out.push(UnionBlock {
                        block: b.clone(),
                        contributors: CoverSet::singleton(ci),
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{consistent8, lists};
    use proptest::prelude::*;

    #[test]
    fn consistent_fixture_builds() {
        let s = consistent8();
        assert_eq!(s.universe_size(), 8);
        assert_eq!(s.num_coverings(), 5);
        assert_eq!(s.decision().classes().len(), 3);
    }

    #[test]
    fn single_all_block_covering() {
        let s = build_system(
            3,
            &[("C1".into(), lists(&[&[0, 1, 2]]))],
            &lists(&[&[0], &[1, 2]]),
        );
        assert!(s.is_ok());
    }

    #[test]
    fn coverage_gap_rejected() {
        let e = build_system(3, &[("C1".into(), lists(&[&[0, 1]]))], &lists(&[&[0, 1, 2]]))
            .unwrap_err();
        assert_eq!(
            e,
            ModelError::CoverageGap {
                covering: "C1".into(),
                first_missing: 2
            }
        );
    }

    #[test]
    fn structural_errors() {
        let dec = lists(&[&[0, 1, 2]]);
        let e = build_system(3, &[("C1".into(), lists(&[&[0, 1, 2], &[]]))], &dec).unwrap_err();
        assert!(matches!(e, ModelError::EmptyBlock { block: 1, .. }));

        let e = build_system(3, &[("C1".into(), lists(&[&[0, 1, 3]]))], &dec).unwrap_err();
        assert!(matches!(e, ModelError::IndexOutOfRange { index: 3, .. }));

        let e = build_system(
            3,
            &[
                ("C1".into(), lists(&[&[0, 1, 2]])),
                ("C1".into(), lists(&[&[0], &[1, 2]])),
            ],
            &dec,
        )
        .unwrap_err();
        assert_eq!(e, ModelError::DuplicateCoveringName("C1".into()));

        let e = build_system(3, &[("C1".into(), lists(&[&[0, 1], &[2], &[1, 0]]))], &dec)
            .unwrap_err();
        assert!(matches!(e, ModelError::DuplicateBlock { block: 2, first: 0, .. }));

        let e = build_system(3, &[], &dec).unwrap_err();
        assert_eq!(e, ModelError::NoCoverings);

        let cov = [("C1".into(), lists(&[&[0, 1, 2]]))];
        let e = build_system(3, &cov, &lists(&[&[0, 1], &[1, 2]])).unwrap_err();
        assert!(matches!(e, ModelError::DecisionNotPartition(_)));
        let e = build_system(3, &cov, &lists(&[&[0, 1]])).unwrap_err();
        assert!(matches!(e, ModelError::DecisionNotPartition(_)));
        let e = build_system(3, &cov, &lists(&[&[0, 1, 2], &[]])).unwrap_err();
        assert!(matches!(e, ModelError::DecisionNotPartition(_)));
    }

    #[test]
    fn union_merges_shared_blocks() {
        let s = consistent8();
        let u = union_of_coverings(&s);
        // {x2,x3} appears in C2, C3 and C4.
        let x2x3 = Block::from_indices(8, [1, 2]).unwrap();
        let hits: Vec<_> = u.iter().filter(|ub| ub.block == x2x3).collect();
        assert_eq!(hits.len(), 1);
        assert_eq!(hits[0].contributors, CoverSet::from_indices([1, 2, 3]));
        let total: usize = s.coverings().map(|c| c.blocks().len()).sum();
        let incidences: usize = u.iter().map(|ub| ub.contributors.len()).sum();
        assert_eq!(incidences, total);
    }

    #[test]
    fn union_of_identical_coverings() {
        let blocks = lists(&[&[0], &[1, 2]]);
        let s = build_system(
            3,
            &[("A".into(), blocks.clone()), ("B".into(), blocks)],
            &lists(&[&[0, 1, 2]]),
        )
        .unwrap();
        let u = union_of_coverings(&s);
        assert_eq!(u.len(), 2);
        assert!(u.iter().all(|ub| ub.contributors == CoverSet::from_indices([0, 1])));

        let single = build_system(3, &[("A".into(), lists(&[&[0], &[1, 2]]))], &lists(&[&[0, 1, 2]]))
            .unwrap();
        assert!(union_of_coverings(&single)
            .iter()
            .all(|ub| ub.contributors.len() == 1));
    }

    #[test]
    fn fingerprint_tracks_content_not_block_order() {
        let a = build_system(3, &[("A".into(), lists(&[&[0], &[1, 2]]))], &lists(&[&[0, 1, 2]]))
            .unwrap();
        let b = build_system(3, &[("A".into(), lists(&[&[1, 2], &[0]]))], &lists(&[&[0, 1, 2]]))
            .unwrap();
        let c = build_system(3, &[("A".into(), lists(&[&[0, 1], &[2]]))], &lists(&[&[0, 1, 2]]))
            .unwrap();
        assert_eq!(a.fingerprint(), b.fingerprint());
        assert_ne!(a.fingerprint(), c.fingerprint());
        let grown = a
            .with_covering(Covering::from_lists("B", 3, &lists(&[&[0, 1, 2]])).unwrap())
            .unwrap();
        assert_ne!(grown.fingerprint(), a.fingerprint());
        assert_eq!(grown.without_covering(1).unwrap().fingerprint(), a.fingerprint());
        assert!(a.without_covering(0).is_none());
    }

    proptest! {
        // Dropping an object from every block of a covering, or copying an
        // object into a second decision class, must be rejected.
        #[test]
        fn mutations_are_rejected(
            n in 2usize..12,
            seed_blocks in proptest::collection::vec(proptest::collection::btree_set(0usize..12, 1..5), 1..5),
            victim in 0usize..12,
        ) {
            let victim = victim % n;
            let mut blocks: Vec<Vec<usize>> = seed_blocks
                .iter()
                .map(|s| s.iter().copied().filter(|&x| x < n).collect::<Vec<_>>())
                .filter(|b: &Vec<usize>| !b.is_empty())
                .collect();
            blocks.push((0..n).collect());
            blocks.sort();
            blocks.dedup();
            let decision = vec![(0..n / 2).collect::<Vec<_>>(), (n / 2..n).collect()];
            let decision: Vec<Vec<usize>> = decision.into_iter().filter(|c| !c.is_empty()).collect();
            prop_assert!(build_system(n, &[("C".into(), blocks.clone())], &decision).is_ok());

            let mut dropped: Vec<Vec<usize>> = blocks
                .iter()
                .map(|b| b.iter().copied().filter(|&x| x != victim).collect::<Vec<_>>())
                .filter(|b| !b.is_empty())
                .collect();
            dropped.sort();
            dropped.dedup();
            let is_gap = matches!(
                build_system(n, &[("C".into(), dropped)], &decision),
                Err(ModelError::CoverageGap { .. })
            );
            prop_assert!(is_gap);

            if decision.len() == 2 {
                let mut overlapping = decision.clone();
                let other = if decision[0].contains(&victim) { 1 } else { 0 };
                overlapping[other].push(victim);
                let is_overlap = matches!(
                    build_system(n, &[("C".into(), blocks)], &overlapping),
                    Err(ModelError::DecisionNotPartition(_))
                );
                prop_assert!(is_overlap);
            }
        }
    }
}
