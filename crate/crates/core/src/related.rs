//! Admissible blocks, related sets `r(x)` and the related function.

use std::collections::HashMap;

use crate::block::Block;
use crate::coverset::CoverSet;
use crate::minimizer::MonotoneFormula;
use crate::model::{union_of_coverings, Covering, CoveringDecisionSystem, DecisionPartition};

/// Blocks of `∪Δ` that lie inside a single decision class.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdmissibleBlocks {
    pub blocks: Vec<(Block, CoverSet)>,
    pub union: Block,
}

pub fn admissible_blocks(system: &CoveringDecisionSystem) -> AdmissibleBlocks {
    let decision = system.decision();
    let mut union = Block::empty(system.universe_size());
    let blocks: Vec<(Block, CoverSet)> = union_of_coverings(system)
        .into_iter()
        .filter(|ub| decision.class_containing(&ub.block).is_some())
        .map(|ub| {
            union.union_with(&ub.block);
            (ub.block, ub.contributors)
        })
        .collect();
    AdmissibleBlocks { blocks, union }
}

/// Admissible blocks of a single covering and their union.
pub fn covering_admissible(covering: &Covering, decision: &DecisionPartition) -> (Vec<Block>, Block) {
    let mut union = Block::empty(covering.universe());
    let blocks = covering
        .blocks()
        .iter()
        .filter(|b| decision.class_containing(b).is_some())
        .inspect(|b| union.union_with(b))
        .cloned()
        .collect();
    (blocks, union)
}

/// `r(x)` for every object, as covering index sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelatedFamily {
    pub r: Vec<CoverSet>,
    /// Objects with non-empty `r(x)`; equals `∪𝒜` and the positive region.
    pub nonempty_objects: Block,
}

impl RelatedFamily {
    pub fn from_sets(r: Vec<CoverSet>) -> Self {
        let mut nonempty = Block::empty(r.len());
        for (x, s) in r.iter().enumerate() {
            if !s.is_empty() {
                nonempty.insert(x);
            }
        }
        RelatedFamily {
            r,
            nonempty_objects: nonempty,
        }
    }

    pub fn universe(&self) -> usize {
        self.r.len()
    }

    /// Distinct non-empty related sets, in order of first occurrence.
    pub fn family(&self) -> Vec<CoverSet> {
        clause_provenance(self).into_iter().map(|(c, _)| c).collect()
    }
}

pub fn related_sets(system: &CoveringDecisionSystem) -> RelatedFamily {
    let mut r = vec![CoverSet::EMPTY; system.universe_size()];
    for (ci, c) in system.coverings().enumerate() {
        for b in c.blocks() {
            if system.decision().class_containing(b).is_some() {
                for x in b.iter() {
                    r[x].insert(ci);
                }
            }
        }
    }
    RelatedFamily::from_sets(r)
}

/// The related function `f = ⋀ { ⋁ r(x) | r(x) ≠ ∅ }` as a CNF over covering
/// indices, one clause per distinct non-empty `r(x)`.
pub fn related_function(rf: &RelatedFamily) -> MonotoneFormula {
    MonotoneFormula::cnf(rf.family())
}

/// Distinct non-empty related sets with the objects that produced them.
pub fn clause_provenance(rf: &RelatedFamily) -> Vec<(CoverSet, Vec<usize>)> {
    let mut index: HashMap<CoverSet, usize> = HashMap::new();
    let mut out: Vec<(CoverSet, Vec<usize>)> = Vec::new();
    for (x, &s) in rf.r.iter().enumerate() {
        if s.is_empty() {
            continue;
        }
        match index.get(&s) {
            Some(&k) => out[k].1.push(x),
            None => {
                index.insert(s, out.len());
                out.push((s, vec![x]));
            }
        }
    }
    out
}
