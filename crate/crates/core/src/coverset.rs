//! Sets of coverings, addressed by their position in the system.

use std::cmp::Ordering;
use std::fmt;

/// Maximum number of coverings a system may hold.
pub const MAX_COVERINGS: usize = 128;

/// A set of covering indices backed by a 128-bit mask.
///
/// Used for related sets `r(x)`, CNF clauses, DNF implicants and reducts.
/// Ordering is lexicographic on the ascending index lists, so `{0,1} <
/// {0,3} < {1,2}` and a set sorts before any of its extensions.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct CoverSet(u128);

impl CoverSet {
    pub const EMPTY: CoverSet = CoverSet(0);

    #[inline]
    pub fn from_bits(bits: u128) -> Self {
        CoverSet(bits)
    }

    #[inline]
    pub fn bits(self) -> u128 {
        self.0
    }

    #[inline]
    pub fn singleton(i: usize) -> Self {
        debug_assert!(i < MAX_COVERINGS);
        CoverSet(1u128 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices
            .into_iter()
            .fold(CoverSet::EMPTY, |acc, i| acc.with(i))
    }

    #[inline]
    pub fn with(self, i: usize) -> Self {
        CoverSet(self.0 | (1u128 << i))
    }

    #[inline]
    pub fn without(self, i: usize) -> Self {
        CoverSet(self.0 & !(1u128 << i))
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u128 << i;
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        i < MAX_COVERINGS && self.0 & (1u128 << i) != 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn is_subset(self, other: CoverSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_strict_subset(self, other: CoverSet) -> bool {
        self.is_subset(other) && self.0 != other.0
    }

    #[inline]
    pub fn intersects(self, other: CoverSet) -> bool {
        self.0 & other.0 != 0
    }

    #[inline]
    pub fn union(self, other: CoverSet) -> CoverSet {
        CoverSet(self.0 | other.0)
    }

    /// Drops index `i` and shifts every higher index down by one. Used when a
    /// covering is removed from the middle of a system.
    pub fn remove_index(self, i: usize) -> CoverSet {
        let low_mask = (1u128 << i) - 1;
        let low = self.0 & low_mask;
        let high = if i + 1 >= MAX_COVERINGS {
            0
        } else {
            (self.0 >> (i + 1)) << i
        };
        CoverSet(low | high)
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let tz = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(tz)
            }
        })
    }

    pub fn to_indices(self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl Ord for CoverSet {
    fn cmp(&self, other: &Self) -> Ordering {
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Ordering::Equal;
        }
        let e = diff.trailing_zeros();
        let above = |bits: u128| e < 127 && bits >> (e + 1) != 0;
        if self.0 & (1u128 << e) != 0 {
            if above(other.0) {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        } else if above(self.0) {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

impl PartialOrd for CoverSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for CoverSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
