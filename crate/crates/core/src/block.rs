//! Fixed-width bit sets over a universe `{0, .., n-1}`.

use std::cmp::Ordering;
use std::fmt;

const WORD_BITS: usize = 64;

/// Index of an object in the universe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectId(pub usize);

/// A subset of the universe stored as a bit vector.
///
/// Two blocks are equal iff they range over the same universe and hold the
/// same members. Ordering is lexicographic on the ascending member lists.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Block {
    universe: usize,
    words: Vec<u64>,
}

#[inline]
fn word_count(n: usize) -> usize {
    n.div_ceil(WORD_BITS)
}

impl Block {
    pub fn empty(universe: usize) -> Self {
        Block {
            universe,
            words: vec![0; word_count(universe)],
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut b = Block::empty(universe);
        for w in b.words.iter_mut() {
            *w = u64::MAX;
        }
        b.clear_tail();
        b
    }

    /// Builds a block from member indices. Returns the first offending index
    /// if any member is `>= universe`.
    pub fn from_indices<I>(universe: usize, indices: I) -> Result<Self, usize>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut b = Block::empty(universe);
        for i in indices {
            if i >= universe {
                return Err(i);
            }
            b.insert(i);
        }
        Ok(b)
    }

    fn clear_tail(&mut self) {
        let rem = self.universe % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        debug_assert!(i < self.universe);
        self.words[i / WORD_BITS] |= 1u64 << (i % WORD_BITS);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        debug_assert!(i < self.universe);
        self.words[i / WORD_BITS] &= !(1u64 << (i % WORD_BITS));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        i < self.universe && self.words[i / WORD_BITS] & (1u64 << (i % WORD_BITS)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe
    }

    pub fn is_subset(&self, other: &Block) -> bool {
        debug_assert_eq!(self.universe, other.universe);
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_strict_subset(&self, other: &Block) -> bool {
        self.is_subset(other) && self != other
    }

    pub fn intersects(&self, other: &Block) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn union_with(&mut self, other: &Block) {
        debug_assert_eq!(self.universe, other.universe);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &Block) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &Block) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn union(&self, other: &Block) -> Block {
        let mut out = self.clone();
        out.union_with(other);
        out
    }

    pub fn intersection(&self, other: &Block) -> Block {
        let mut out = self.clone();
        out.intersect_with(other);
        out
    }

    pub fn difference(&self, other: &Block) -> Block {
        let mut out = self.clone();
        out.difference_with(other);
        out
    }

    pub fn complement(&self) -> Block {
        let mut out = self.clone();
        for w in out.words.iter_mut() {
            *w = !*w;
        }
        out.clear_tail();
        out
    }

    /// Smallest member, if any.
    pub fn first(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD_BITS + w.trailing_zeros() as usize)
    }

    /// Members in ascending order.
    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            index: 0,
            current: self.words.first().copied().unwrap_or(0),
        }
    }

    pub fn to_indices(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub(crate) fn words(&self) -> &[u64] {
        &self.words
    }

    /// True if some member is strictly greater than `i`.
    fn has_member_above(&self, i: usize) -> bool {
        let wi = i / WORD_BITS;
        let bit = i % WORD_BITS;
        let head = if bit == WORD_BITS - 1 {
            0
        } else {
            self.words[wi] & (u64::MAX << (bit + 1))
        };
        head != 0 || self.words[wi + 1..].iter().any(|&w| w != 0)
    }
}

impl Ord for Block {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.universe != other.universe {
            return self.universe.cmp(&other.universe);
        }
        // The first element on which the member lists diverge is the lowest
        // bit of the symmetric difference.
        let diff = self
            .words
            .iter()
            .zip(&other.words)
            .enumerate()
            .find(|(_, (a, b))| *a != *b);
        let Some((wi, (a, b))) = diff else {
            return Ordering::Equal;
        };
        let e = wi * WORD_BITS + (a ^ b).trailing_zeros() as usize;
        if self.contains(e) {
            // `other` continues with something larger than `e`, or stops.
            if other.has_member_above(e) {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        } else if self.has_member_above(e) {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

impl PartialOrd for Block {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    index: usize,
    current: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        loop {
            if self.current != 0 {
                let tz = self.current.trailing_zeros() as usize;
                self.current &= self.current - 1;
                return Some(self.index * WORD_BITS + tz);
            }
            self.index += 1;
            if self.index >= self.words.len() {
                return None;
            }
            self.current = self.words[self.index];
        }
    }
}

impl<'a> IntoIterator for &'a Block {
    type Item = usize;
    type IntoIter = Iter<'a>;

    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}
