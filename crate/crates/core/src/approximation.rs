//! Minimal descriptions, third-type lower/upper approximations, decision
//! regions and union-reducible blocks.

use std::collections::HashSet;

use thiserror::Error;

use crate::block::Block;
use crate::model::{union_of_coverings, CoveringDecisionSystem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ApproxError {
    #[error("object {0} lies in no block")]
    UncoveredObject(usize),
}

/// `Md(x)` for every object, computed against a fixed block collection.
#[derive(Clone, Debug)]
pub struct MinimalDescriptionMap {
    blocks: Vec<Block>,
    per_object: Vec<Vec<usize>>,
}

impl MinimalDescriptionMap {
    pub fn universe(&self) -> usize {
        self.per_object.len()
    }

    /// The minimal blocks containing `x`.
    pub fn get(&self, x: usize) -> impl Iterator<Item = &Block> {
        self.per_object[x].iter().map(move |&k| &self.blocks[k])
    }

    /// The (deduplicated) block collection the map was computed against.
    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    fn is_minimal_somewhere(&self) -> Vec<bool> {
        let mut used = vec![false; self.blocks.len()];
        for ks in &self.per_object {
            for &k in ks {
                used[k] = true;
            }
        }
        used
    }
}

fn dedup_blocks(blocks: &[Block]) -> Vec<Block> {
    let mut seen = HashSet::with_capacity(blocks.len());
    blocks
        .iter()
        .filter(|b| seen.insert(*b))
        .cloned()
        .collect()
}

fn describe(blocks: &[Block], n: usize) -> MinimalDescriptionMap {
    let blocks = dedup_blocks(blocks);
    let mut containing: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, b) in blocks.iter().enumerate() {
        for x in b.iter() {
            containing[x].push(k);
        }
    }
    let per_object = containing
        .into_iter()
        .map(|ks| {
            ks.iter()
                .copied()
                .filter(|&k| {
                    !ks.iter()
                        .any(|&s| s != k && blocks[s].is_strict_subset(&blocks[k]))
                })
                .collect()
        })
        .collect();
    MinimalDescriptionMap { blocks, per_object }
}

/// `Md(x)` for each `x` in `0..n`: the inclusion-minimal blocks containing `x`.
/// Duplicate blocks in the input are treated as one.
pub fn minimal_descriptions(blocks: &[Block], n: usize) -> Result<MinimalDescriptionMap, ApproxError> {
    let md = describe(blocks, n);
    if let Some(x) = md.per_object.iter().position(Vec::is_empty) {
        return Err(ApproxError::UncoveredObject(x));
    }
    Ok(md)
}

/// Third lower approximation `CL(X)`: the union of all blocks inside `target`.
pub fn third_lower<'a, I>(blocks: I, target: &Block) -> Block
where
    I: IntoIterator<Item = &'a Block>,
{
    let mut out = Block::empty(target.universe());
    for b in blocks {
        if b.is_subset(target) {
            out.union_with(b);
        }
    }
    out
}

/// Third upper approximation `CH(X)`: the union of `Md(x)` over `x ∈ target`.
pub fn third_upper(md: &MinimalDescriptionMap, target: &Block) -> Block {
    let mut out = Block::empty(target.universe());
    for x in target.iter() {
        for b in md.get(x) {
            out.union_with(b);
        }
    }
    out
}

/// Per-class approximations of `U/D` with respect to `∪Δ`, and the aggregate
/// positive, boundary and negative regions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionReport {
    pub lower: Vec<Block>,
    pub upper: Vec<Block>,
    pub positive: Block,
    pub boundary: Block,
    pub negative: Block,
}

impl RegionReport {
    /// `BND(D_i) = CH(D_i) \ CL(D_i)`.
    pub fn class_boundary(&self, class: usize) -> Block {
        self.upper[class].difference(&self.lower[class])
    }

    /// `NEG(D_i) = U \ CH(D_i)`.
    pub fn class_negative(&self, class: usize) -> Block {
        self.upper[class].complement()
    }
}

pub fn regions(system: &CoveringDecisionSystem) -> RegionReport {
    let n = system.universe_size();
    let blocks: Vec<Block> = union_of_coverings(system)
        .into_iter()
        .map(|ub| ub.block)
        .collect();
    let md = describe(&blocks, n);
    let classes = system.decision().classes();
    let lower: Vec<Block> = classes.iter().map(|c| third_lower(&blocks, c)).collect();
    let upper: Vec<Block> = classes.iter().map(|c| third_upper(&md, c)).collect();
    let mut positive = Block::empty(n);
    let mut covered = Block::empty(n);
    for (l, u) in lower.iter().zip(&upper) {
        positive.union_with(l);
        covered.union_with(u);
    }
    let boundary = covered.difference(&positive);
    let negative = covered.complement();
    RegionReport {
        lower,
        upper,
        positive,
        boundary,
        negative,
    }
}

/// `POS_{∪Δ}(D)` alone: the union of all blocks that fit inside a decision
/// class.
pub fn positive_region(system: &CoveringDecisionSystem) -> Block {
    let mut pos = Block::empty(system.universe_size());
    for c in system.coverings() {
        for b in c.blocks() {
            if system.decision().class_containing(b).is_some() {
                pos.union_with(b);
            }
        }
    }
    pos
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Consistency {
    Consistent,
    Inconsistent,
}

impl Consistency {
    pub fn from_positive(positive: &Block) -> Self {
        if positive.is_full() {
            Consistency::Consistent
        } else {
            Consistency::Inconsistent
        }
    }

    pub fn is_consistent(self) -> bool {
        self == Consistency::Consistent
    }
}

/// Consistent iff the positive region is the whole universe.
pub fn classify_consistency(system: &CoveringDecisionSystem) -> Consistency {
    Consistency::from_positive(&positive_region(system))
}

/// Blocks that are a minimal description of no object and can be dropped
/// without changing any `Md(x)`.
pub fn union_reducible_blocks(blocks: &[Block], n: usize) -> Vec<Block> {
    let md = describe(blocks, n);
    let used = md.is_minimal_somewhere();
    md.blocks
        .iter()
        .zip(used)
        .filter(|(_, u)| !u)
        .map(|(b, _)| b.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{consistent8, inconsistent8, system};
    use proptest::prelude::*;

    fn b(n: usize, xs: &[usize]) -> Block {
        Block::from_indices(n, xs.iter().copied()).unwrap()
    }

    fn md_of(md: &MinimalDescriptionMap, x: usize) -> Vec<Vec<usize>> {
        let mut v: Vec<_> = md.get(x).map(Block::to_indices).collect();
        v.sort();
        v
    }

    #[test]
    fn minimal_descriptions_of_first_covering() {
        let s = consistent8();
        let md = minimal_descriptions(s.covering(0).blocks(), 8).unwrap();
        assert_eq!(md_of(&md, 2), vec![vec![2]]);
        assert_eq!(md_of(&md, 1), vec![vec![0, 1], vec![1, 2, 3]]);
    }

    #[test]
    fn minimal_descriptions_single_block() {
        let md = minimal_descriptions(&[Block::full(4)], 4).unwrap();
        for x in 0..4 {
            assert_eq!(md_of(&md, x), vec![vec![0, 1, 2, 3]]);
        }
    }

    #[test]
    fn uncovered_object_is_an_error() {
        let e = minimal_descriptions(&[b(3, &[0, 1])], 3).unwrap_err();
        assert_eq!(e, ApproxError::UncoveredObject(2));
    }

    #[test]
    fn lower_approximation_examples() {
        let s = consistent8();
        let all: Vec<Block> = s.coverings().flat_map(|c| c.blocks().to_vec()).collect();
        assert_eq!(third_lower(&all, &Block::empty(8)), Block::empty(8));
        assert_eq!(third_lower(&all, &Block::full(8)), Block::full(8));
        let d1 = b(8, &[0, 1, 2]);
        assert_eq!(third_lower(&all, &d1), d1);
    }

    #[test]
    fn upper_approximation_examples() {
        let s = consistent8();
        let md = minimal_descriptions(s.covering(0).blocks(), 8).unwrap();
        assert_eq!(third_upper(&md, &Block::empty(8)), Block::empty(8));
        assert_eq!(third_upper(&md, &Block::full(8)), Block::full(8));
        assert_eq!(third_upper(&md, &b(8, &[2])), b(8, &[2]));
    }

    #[test]
    fn regions_of_fixtures() {
        let r = regions(&consistent8());
        assert!(r.positive.is_full());
        assert!(r.negative.is_empty());

        let r = regions(&inconsistent8());
        assert_eq!(r.positive, b(8, &[0, 3, 4, 5, 6, 7]));
        assert_eq!(r.boundary, b(8, &[1, 2]));
        assert!(r.negative.is_empty());
        assert_eq!(positive_region(&inconsistent8()), r.positive);

        let one_class = system(3, &[("C1", &[&[0, 1], &[1, 2]])], &[&[0, 1, 2]]);
        assert!(regions(&one_class).positive.is_full());
    }

    #[test]
    fn classwise_regions() {
        let r = regions(&inconsistent8());
        for i in 0..r.lower.len() {
            let bnd = r.class_boundary(i);
            let neg = r.class_negative(i);
            assert!(!bnd.intersects(&r.lower[i]));
            assert!(!neg.intersects(&r.upper[i]));
        }
    }

    #[test]
    fn consistency_of_fixtures() {
        assert_eq!(classify_consistency(&consistent8()), Consistency::Consistent);
        assert_eq!(classify_consistency(&inconsistent8()), Consistency::Inconsistent);
        let singletons = system(
            3,
            &[("C1", &[&[0], &[1], &[2]])],
            &[&[0], &[1], &[2]],
        );
        assert_eq!(classify_consistency(&singletons), Consistency::Consistent);
    }

    #[test]
    fn union_reducible_examples() {
        let got = union_reducible_blocks(&[b(2, &[0]), b(2, &[1]), b(2, &[0, 1])], 2);
        assert_eq!(got, vec![b(2, &[0, 1])]);

        let partition = [b(5, &[0, 3]), b(5, &[1]), b(5, &[2, 4])];
        assert!(union_reducible_blocks(&partition, 5).is_empty());

        let s = consistent8();
        let all: Vec<Block> = s.coverings().flat_map(|c| c.blocks().to_vec()).collect();
        let red = union_reducible_blocks(&all, 8);
        assert!(red.contains(&b(8, &[2, 3, 4, 5])));
    }

    fn arb_blocks(n: usize) -> impl Strategy<Value = Vec<Block>> {
        proptest::collection::vec(proptest::collection::btree_set(0..n, 1..=n), 1..8).prop_map(
            move |sets| {
                let mut blocks: Vec<Block> = sets
                    .into_iter()
                    .map(|s| Block::from_indices(n, s).unwrap())
                    .collect();
                // patch block so every object is covered
                let mut covered = Block::empty(n);
                for b in &blocks {
                    covered.union_with(b);
                }
                let rest = covered.complement();
                if !rest.is_empty() {
                    blocks.push(rest);
                }
                blocks
            },
        )
    }

    proptest! {
        #[test]
        fn lower_inside_target_inside_upper(
            blocks in arb_blocks(9),
            xs in proptest::collection::btree_set(0usize..9, 0..9),
            extra in proptest::collection::btree_set(0usize..9, 0..9),
        ) {
            let x = Block::from_indices(9, xs).unwrap();
            let y = x.union(&Block::from_indices(9, extra).unwrap());
            let md = minimal_descriptions(&blocks, 9).unwrap();
            let lx = third_lower(&blocks, &x);
            let ux = third_upper(&md, &x);
            prop_assert!(lx.is_subset(&x));
            prop_assert!(x.is_subset(&ux));
            // monotone in the target
            prop_assert!(lx.is_subset(&third_lower(&blocks, &y)));
            prop_assert!(ux.is_subset(&third_upper(&md, &y)));
            // CL through minimal descriptions only gives the same set
            let mut via_md = Block::empty(9);
            for z in 0..9 {
                for k in md.get(z) {
                    if k.is_subset(&x) {
                        via_md.union_with(k);
                    }
                }
            }
            prop_assert_eq!(via_md, lx);
        }

        #[test]
        fn md_blocks_are_minimal_and_contain_x(blocks in arb_blocks(8)) {
            let md = minimal_descriptions(&blocks, 8).unwrap();
            for x in 0..8 {
                for k in md.get(x) {
                    prop_assert!(k.contains(x));
                    prop_assert!(!blocks.iter().any(|s| s.contains(x) && s.is_strict_subset(k)));
                }
            }
        }

        #[test]
        fn removing_reducible_blocks_keeps_descriptions(blocks in arb_blocks(8)) {
            let reducible = union_reducible_blocks(&blocks, 8);
            let kept: Vec<Block> = blocks.iter().filter(|b| !reducible.contains(b)).cloned().collect();
            let before = minimal_descriptions(&blocks, 8).unwrap();
            let after = minimal_descriptions(&kept, 8).unwrap();
            for x in 0..8 {
                prop_assert_eq!(md_of(&before, x), md_of(&after, x));
            }
        }
    }
}
