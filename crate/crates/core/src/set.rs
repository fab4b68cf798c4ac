use std::fmt;

use fixedbitset::FixedBitSet;

use crate::arena::StateId;

/// Dense set of states backed by a bitset.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct StateSet {
    bits: FixedBitSet,
}

impl StateSet {
    pub fn empty(capacity: usize) -> Self {
        StateSet {
            bits: FixedBitSet::with_capacity(capacity),
        }
    }

    pub fn full(capacity: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(capacity);
        bits.insert_range(..);
        StateSet { bits }
    }

    pub fn from_ids<I: IntoIterator<Item = StateId>>(capacity: usize, ids: I) -> Self {
        let mut set = StateSet::empty(capacity);
        for id in ids {
            set.insert(id);
        }
        set
    }

    pub fn capacity(&self) -> usize {
        self.bits.len()
    }

    pub fn contains(&self, s: StateId) -> bool {
        self.bits.contains(s.index())
    }

    pub fn insert(&mut self, s: StateId) -> bool {
        !self.bits.put(s.index())
    }

    pub fn remove(&mut self, s: StateId) {
        self.bits.set(s.index(), false);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = StateId> + '_ {
        self.bits.ones().map(StateId::new)
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn union_with(&mut self, other: &StateSet) {
        self.bits.union_with(&other.bits);
    }

    pub fn intersect_with(&mut self, other: &StateSet) {
        self.bits.intersect_with(&other.bits);
    }

    pub fn difference_with(&mut self, other: &StateSet) {
        self.bits.difference_with(&other.bits);
    }

    /// Complement relative to the set's capacity.
    pub fn complement(&self) -> StateSet {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        StateSet { bits }
    }
}

impl fmt::Debug for StateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.bits.ones()).finish()
    }
}
