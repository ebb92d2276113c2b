//! Sets of states, represented as bit arrays over a model's state indices.

use std::cmp::Ordering;
use std::fmt;

use fixedbitset::FixedBitSet;

/// A subset of the states of one model.
///
/// The bit array has exactly one slot per state of the owning model, so the
/// universe size travels with the set and complement is always well defined.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthSet {
    bits: FixedBitSet,
}

impl TruthSet {
    pub fn empty(universe: usize) -> Self {
        TruthSet {
            bits: FixedBitSet::with_capacity(universe),
        }
    }

    pub fn full(universe: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(universe);
        bits.insert_range(..);
        TruthSet { bits }
    }

    /// Builds a set from state indices. Indices outside the universe are ignored.
    pub fn from_indices<I: IntoIterator<Item = usize>>(universe: usize, indices: I) -> Self {
        let mut set = Self::empty(universe);
        for i in indices {
            if i < universe {
                set.bits.insert(i);
            }
        }
        set
    }

    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    pub fn contains(&self, state: usize) -> bool {
        self.bits.contains(state)
    }

    pub fn insert(&mut self, state: usize) {
        self.bits.insert(state);
    }

    pub fn remove(&mut self, state: usize) {
        self.bits.set(state, false);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.len() == self.universe()
    }

    /// State indices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn complement(&self) -> TruthSet {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        TruthSet { bits }
    }

    pub fn union(&self, other: &TruthSet) -> TruthSet {
        debug_assert_eq!(self.universe(), other.universe());
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        TruthSet { bits }
    }

    pub fn intersection(&self, other: &TruthSet) -> TruthSet {
        debug_assert_eq!(self.universe(), other.universe());
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        TruthSet { bits }
    }

    pub fn difference(&self, other: &TruthSet) -> TruthSet {
        debug_assert_eq!(self.universe(), other.universe());
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        TruthSet { bits }
    }

    pub fn is_subset(&self, other: &TruthSet) -> bool {
        self.bits.is_subset(&other.bits)
    }
}

/// Lexicographic order on the sorted member lists, with the universe size as
/// the first key. This is the canonical order used when reporting families.
impl Ord for TruthSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.universe()
            .cmp(&other.universe())
            .then_with(|| self.iter().cmp(other.iter()))
    }
}

impl PartialOrd for TruthSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for TruthSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
