//! Seeded synthetic covering decision systems.
//!
//! Decision classes are a k-coloring of contiguous runs of objects, and
//! covering blocks are random intervals plus one patch block holding whatever
//! the intervals missed. An interval that stays inside a run is admissible, so
//! run length against block length controls how large the related sets get.

use std::collections::BTreeSet;

use rand::Rng;
use relfam::model::build_system;
use relfam::{Covering, CoveringDecisionSystem, ModelError};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorParams {
    /// Target number of blocks per covering, patch block included.
    pub blocks_per_covering: usize,
    pub min_block_len: usize,
    pub max_block_len: usize,
    /// Number of decision colors.
    pub classes: usize,
    /// Mean length of a same-decision run; actual runs vary by ±50%.
    pub mean_run_len: usize,
}

impl Default for GeneratorParams {
    fn default() -> Self {
        GeneratorParams {
            blocks_per_covering: 60,
            min_block_len: 20,
            max_block_len: 80,
            classes: 3,
            mean_run_len: 100,
        }
    }
}

/// Interval blocks over `0..n` plus a patch block for uncovered objects.
pub fn covering_lists<R: Rng>(rng: &mut R, n: usize, params: &GeneratorParams) -> Vec<Vec<usize>> {
    let mut blocks: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut covered = vec![false; n];
    let intervals = params.blocks_per_covering.saturating_sub(1);
    let lo = params.min_block_len.clamp(1, n);
    let hi = params.max_block_len.clamp(lo, n);
    for _ in 0..intervals {
        let len = rng.gen_range(lo..=hi);
        let start = rng.gen_range(0..=n - len);
        for c in &mut covered[start..start + len] {
            *c = true;
        }
        blocks.insert((start..start + len).collect());
    }
    let patch: Vec<usize> = (0..n).filter(|&x| !covered[x]).collect();
    if !patch.is_empty() {
        blocks.insert(patch);
    }
    blocks.into_iter().collect()
}

/// Decision classes from runs of random length, each run colored differently
/// from the one before it.
pub fn decision_lists<R: Rng>(rng: &mut R, n: usize, params: &GeneratorParams) -> Vec<Vec<usize>> {
    let k = params.classes.max(1);
    let mut classes: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mean = params.mean_run_len.max(1);
    let (lo, hi) = ((mean / 2).max(1), (mean + mean / 2).max(1));
    let mut x = 0;
    let mut prev = usize::MAX;
    while x < n {
        let len = rng.gen_range(lo..=hi).min(n - x);
        let mut color = rng.gen_range(0..k);
        if k > 1 && color == prev {
            color = (color + 1 + rng.gen_range(0..k - 1)) % k;
        }
        classes[color].extend(x..x + len);
        prev = color;
        x += len;
    }
    classes.retain(|c| !c.is_empty());
    classes
}

pub fn generate_covering<R: Rng>(
    rng: &mut R,
    name: &str,
    n: usize,
    params: &GeneratorParams,
) -> Result<Covering, ModelError> {
    Covering::from_lists(name, n, &covering_lists(rng, n, params))
}

/// A system with coverings `C1..Cm` over `n` objects.
pub fn generate_system<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    params: &GeneratorParams,
) -> Result<CoveringDecisionSystem, ModelError> {
    let decision = decision_lists(rng, n, params);
    let coverings: Vec<(String, Vec<Vec<usize>>)> = (1..=m)
        .map(|i| (format!("C{i}"), covering_lists(rng, n, params)))
        .collect();
    build_system(n, &coverings, &decision)
}

/// Small unstructured blocks over `0..n`: up to `max_blocks - 1` random
/// subsets plus a patch block.
pub fn small_covering_lists<R: Rng>(rng: &mut R, n: usize, max_blocks: usize) -> Vec<Vec<usize>> {
    let count = rng.gen_range(0..max_blocks.max(1));
    let mut raw: Vec<BTreeSet<usize>> = Vec::with_capacity(count);
    for _ in 0..count {
        let size = rng.gen_range(1..=n.min(4));
        raw.push((0..size).map(|_| rng.gen_range(0..n)).collect());
    }
    let mut seen = vec![false; n];
    for b in &raw {
        for &x in b {
            seen[x] = true;
        }
    }
    let mut blocks: BTreeSet<Vec<usize>> = raw.into_iter().map(|b| b.into_iter().collect()).collect();
    let patch: Vec<usize> = (0..n).filter(|&x| !seen[x]).collect();
    if !patch.is_empty() {
        blocks.insert(patch);
    }
    blocks.into_iter().collect()
}

/// Small random system with `n` objects, `m` coverings of at most
/// `max_blocks` blocks and a random labeling into at most `max_classes`
/// classes.
pub fn small_system<R: Rng>(
    rng: &mut R,
    n: usize,
    m: usize,
    max_blocks: usize,
    max_classes: usize,
) -> Result<CoveringDecisionSystem, ModelError> {
    let k = rng.gen_range(1..=max_classes.max(1));
    let mut decision: Vec<Vec<usize>> = vec![Vec::new(); k];
    for x in 0..n {
        decision[rng.gen_range(0..k)].push(x);
    }
    decision.retain(|c| !c.is_empty());
    let coverings: Vec<(String, Vec<Vec<usize>>)> = (1..=m)
        .map(|i| (format!("C{i}"), small_covering_lists(rng, n, max_blocks)))
        .collect();
    build_system(n, &coverings, &decision)
}
