//! Monotone Boolean formulas over covering indices.
//!
//! A CNF clause or a DNF implicant is a [`CoverSet`]. Turning the related
//! function into its reduced disjunctive form is the same as enumerating the
//! minimal hitting sets (transversals) of the clause family; this is done by
//! multiplying clauses in one at a time and absorbing after every product.

use thiserror::Error;

use crate::coverset::CoverSet;

pub const DEFAULT_TERM_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MinimizeError {
    #[error("intermediate term count {reached} exceeded the limit of {limit}")]
    TermBlowup { limit: usize, reached: usize },
    #[error("expected a CNF formula")]
    NotCnf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Cnf,
    Dnf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Keep {
    Minimal,
    Maximal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonotoneFormula {
    mode: Mode,
    terms: Vec<CoverSet>,
}

impl MonotoneFormula {
    /// A conjunction of clauses. Exact duplicates are dropped; order is kept.
    pub fn cnf(terms: Vec<CoverSet>) -> Self {
        MonotoneFormula {
            mode: Mode::Cnf,
            terms: dedup_stable(terms),
        }
    }

    /// A disjunction of implicants. Exact duplicates are dropped; order is kept.
    pub fn dnf(terms: Vec<CoverSet>) -> Self {
        MonotoneFormula {
            mode: Mode::Dnf,
            terms: dedup_stable(terms),
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn terms(&self) -> &[CoverSet] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<CoverSet> {
        self.terms
    }

    /// Absorbed to an antichain and sorted.
    pub fn normalized(&self) -> Self {
        MonotoneFormula {
            mode: self.mode,
            terms: absorb(&self.terms, Keep::Minimal),
        }
    }

    /// Value under the assignment that sets exactly the variables in `truth`.
    pub fn evaluate(&self, truth: CoverSet) -> bool {
        match self.mode {
            Mode::Cnf => self.terms.iter().all(|c| c.intersects(truth)),
            Mode::Dnf => self.terms.iter().any(|t| t.is_subset(truth)),
        }
    }
}

fn dedup_stable(terms: Vec<CoverSet>) -> Vec<CoverSet> {
    let mut seen = std::collections::HashSet::with_capacity(terms.len());
    terms.into_iter().filter(|t| seen.insert(*t)).collect()
}

/// Reduces `terms` to an antichain: with [`Keep::Minimal`] every term that
/// contains another is dropped, with [`Keep::Maximal`] every term contained in
/// another. The result is sorted.
pub fn absorb(terms: &[CoverSet], keep: Keep) -> Vec<CoverSet> {
    let mut sorted = terms.to_vec();
    sorted.sort_unstable_by_key(|t| (t.len(), *t));
    sorted.dedup();
    if keep == Keep::Maximal {
        sorted.reverse();
    }
    let mut kept: Vec<CoverSet> = Vec::with_capacity(sorted.len());
    for t in sorted {
        let dominated = match keep {
            Keep::Minimal => kept.iter().any(|k| k.is_subset(t)),
            Keep::Maximal => kept.iter().any(|k| t.is_subset(*k)),
        };
        if !dominated {
            kept.push(t);
        }
    }
    kept.sort_unstable();
    kept
}

#[derive(Clone, Copy, Debug)]
pub struct Minimizer {
    pub term_limit: usize,
}

impl Default for Minimizer {
    fn default() -> Self {
        Minimizer {
            term_limit: DEFAULT_TERM_LIMIT,
        }
    }
}

impl Minimizer {
    pub fn with_limit(term_limit: usize) -> Self {
        Minimizer { term_limit }
    }

    /// Reduced disjunctive form of a monotone CNF: all of its minimal hitting
    /// sets, sorted. An empty CNF yields the single empty implicant; a CNF
    /// holding an empty clause yields no implicant at all.
    pub fn minimal_dnf(&self, cnf: &MonotoneFormula) -> Result<MonotoneFormula, MinimizeError> {
        if cnf.mode != Mode::Cnf {
            return Err(MinimizeError::NotCnf);
        }
        let terms = self.transversals(cnf.terms())?;
        Ok(MonotoneFormula {
            mode: Mode::Dnf,
            terms,
        })
    }

    /// Minimal hitting sets of `clauses`, sorted.
    pub fn transversals(&self, clauses: &[CoverSet]) -> Result<Vec<CoverSet>, MinimizeError> {
        let mut clauses = absorb(clauses, Keep::Minimal);
        if clauses.first().is_some_and(|c| c.is_empty()) {
            return Ok(Vec::new());
        }
        clauses.sort_by_key(|c| c.len());

        let mut terms = vec![CoverSet::EMPTY];
        let mut hitters: Vec<CoverSet> = Vec::new();
        let mut missers: Vec<CoverSet> = Vec::new();
        // hitters meeting the clause in exactly one variable, bucketed by it
        let mut single: Vec<Vec<CoverSet>> = vec![Vec::new(); crate::coverset::MAX_COVERINGS];
        for clause in clauses {
            hitters.clear();
            missers.clear();
            for &t in &terms {
                if t.intersects(clause) {
                    hitters.push(t);
                } else {
                    missers.push(t);
                }
            }
            if missers.is_empty() {
                continue;
            }
            for e in clause.iter() {
                single[e].clear();
            }
            for &h in &hitters {
                let meet = CoverSet::from_bits(h.bits() & clause.bits());
                if meet.len() == 1 {
                    single[meet.iter().next().unwrap()].push(h);
                }
            }
            // A product term t ∪ {e} can only be absorbed by a term that already
            // hits the clause, and such a term must meet the clause in exactly e.
            let mut next = std::mem::take(&mut hitters);
            for &t in &missers {
                for e in clause.iter() {
                    let cand = t.with(e);
                    if !single[e].iter().any(|h| h.is_subset(cand)) {
                        next.push(cand);
                    }
                }
                if next.len() > self.term_limit {
                    return Err(MinimizeError::TermBlowup {
                        limit: self.term_limit,
                        reached: next.len(),
                    });
                }
            }
            hitters = std::mem::replace(&mut terms, next);
        }
        terms.sort_unstable();
        debug_assert!(is_antichain(&terms));
        Ok(terms)
    }
}

/// [`Minimizer::minimal_dnf`] with the default term limit.
pub fn minimal_dnf(cnf: &MonotoneFormula) -> Result<MonotoneFormula, MinimizeError> {
    Minimizer::default().minimal_dnf(cnf)
}

/// Candidates that strictly extend none of `existing`. Equal sets are kept.
pub fn filter_non_extensions(candidates: &[CoverSet], existing: &[CoverSet]) -> Vec<CoverSet> {
    candidates
        .iter()
        .copied()
        .filter(|c| !existing.iter().any(|e| e.is_strict_subset(*c)))
        .collect()
}

pub fn is_antichain(terms: &[CoverSet]) -> bool {
    terms.iter().enumerate().all(|(i, a)| {
        terms
            .iter()
            .enumerate()
            .all(|(j, b)| i == j || !a.is_subset(*b))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(xs: &[usize]) -> CoverSet {
        CoverSet::from_indices(xs.iter().copied())
    }

    fn sets(raw: &[&[usize]]) -> Vec<CoverSet> {
        raw.iter().map(|x| s(x)).collect()
    }

    #[test]
    fn absorb_examples() {
        // C1..C5 are indices 0..4
        let clauses = sets(&[&[0, 2, 4], &[0, 1, 2, 3, 4], &[0, 1, 3, 4], &[1, 3]]);
        assert_eq!(absorb(&clauses, Keep::Minimal), sets(&[&[0, 2, 4], &[1, 3]]));
        assert_eq!(absorb(&sets(&[&[0]]), Keep::Minimal), sets(&[&[0]]));
        assert_eq!(absorb(&sets(&[&[0, 1], &[0], &[1]]), Keep::Minimal), sets(&[&[0], &[1]]));
        assert_eq!(absorb(&sets(&[&[0, 1], &[0], &[1]]), Keep::Maximal), sets(&[&[0, 1]]));
    }

    #[test]
    fn dnf_of_two_clauses() {
        let cnf = MonotoneFormula::cnf(sets(&[&[0, 2, 4], &[1, 3]]));
        let dnf = minimal_dnf(&cnf).unwrap();
        assert_eq!(dnf.mode(), Mode::Dnf);
        assert_eq!(
            dnf.terms(),
            sets(&[&[0, 1], &[0, 3], &[1, 2], &[1, 4], &[2, 3], &[3, 4]])
        );
    }

    #[test]
    fn dnf_edge_cases() {
        let empty = minimal_dnf(&MonotoneFormula::cnf(vec![])).unwrap();
        assert_eq!(empty.terms(), &[CoverSet::EMPTY]);
        assert!(empty.evaluate(CoverSet::EMPTY));

        let cnf = MonotoneFormula::cnf(sets(&[&[1, 2], &[0]]));
        assert_eq!(minimal_dnf(&cnf).unwrap().terms(), sets(&[&[0, 1], &[0, 2]]));

        let unsat = MonotoneFormula::cnf(vec![CoverSet::EMPTY, s(&[0])]);
        assert!(minimal_dnf(&unsat).unwrap().terms().is_empty());

        let dnf = MonotoneFormula::dnf(sets(&[&[0]]));
        assert_eq!(minimal_dnf(&dnf), Err(MinimizeError::NotCnf));
    }

    #[test]
    fn term_limit_is_enforced() {
        // (a1∨b1)∧...∧(a8∨b8) has 256 prime implicants
        let clauses: Vec<CoverSet> = (0..8).map(|i| s(&[2 * i, 2 * i + 1])).collect();
        let cnf = MonotoneFormula::cnf(clauses);
        assert_eq!(minimal_dnf(&cnf).unwrap().terms().len(), 256);
        let err = Minimizer::with_limit(100).minimal_dnf(&cnf).unwrap_err();
        assert!(matches!(err, MinimizeError::TermBlowup { limit: 100, .. }));
    }

    #[test]
    fn filter_examples() {
        // C1,C6 / C5,C6 / C1,C2,C6 against {C1,C2}
        let cands = sets(&[&[0, 5], &[4, 5], &[0, 1, 5]]);
        let existing = sets(&[&[0, 1]]);
        assert_eq!(filter_non_extensions(&cands, &existing), sets(&[&[0, 5], &[4, 5]]));
        assert_eq!(filter_non_extensions(&cands, &[]), cands);
        assert_eq!(filter_non_extensions(&existing, &existing), existing);
    }

    fn brute_force_transversals(clauses: &[CoverSet], vars: usize) -> Vec<CoverSet> {
        let hits = |t: CoverSet| clauses.iter().all(|c| c.intersects(t));
        let mut out: Vec<CoverSet> = (0u128..(1 << vars))
            .map(CoverSet::from_bits)
            .filter(|&t| hits(t) && t.iter().all(|e| !hits(t.without(e))))
            .collect();
        out.sort();
        out
    }

    fn arb_clauses(vars: usize) -> impl Strategy<Value = Vec<CoverSet>> {
        proptest::collection::vec(
            proptest::collection::btree_set(0..vars, 1..=vars.min(4)),
            0..10,
        )
        .prop_map(|cs| cs.into_iter().map(CoverSet::from_indices).collect())
    }

    proptest! {
        #[test]
        fn matches_brute_force(clauses in arb_clauses(8)) {
            let got = Minimizer::default().transversals(&clauses).unwrap();
            prop_assert_eq!(got, brute_force_transversals(&clauses, 8));
        }

        #[test]
        fn invariant_under_reordering_duplication_absorption(clauses in arb_clauses(9), rot in 0usize..10) {
            let m = Minimizer::default();
            let base = m.transversals(&clauses).unwrap();
            let mut shuffled = clauses.clone();
            if !shuffled.is_empty() {
                let k = rot % shuffled.len();
                shuffled.rotate_left(k);
                shuffled.reverse();
            }
            let mut doubled = shuffled.clone();
            doubled.extend(clauses.iter().copied());
            prop_assert_eq!(&m.transversals(&shuffled).unwrap(), &base);
            prop_assert_eq!(&m.transversals(&doubled).unwrap(), &base);
            prop_assert_eq!(&m.transversals(&absorb(&clauses, Keep::Minimal)).unwrap(), &base);
        }

        #[test]
        fn absorb_yields_antichain(terms in arb_clauses(7)) {
            let min = absorb(&terms, Keep::Minimal);
            let max = absorb(&terms, Keep::Maximal);
            prop_assert!(is_antichain(&min));
            prop_assert!(is_antichain(&max));
            for t in &terms {
                prop_assert!(min.iter().any(|m| m.is_subset(*t)));
                prop_assert!(max.iter().any(|m| t.is_subset(*m)));
            }
        }
    }
}
