use std::fmt;

use fixedbitset::FixedBitSet;

use super::VertexId;

/// A set of vertices of a fixed-size game.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VertexSet {
    bits: FixedBitSet,
}

impl VertexSet {
    pub fn new(n: usize) -> Self {
        VertexSet {
            bits: FixedBitSet::with_capacity(n),
        }
    }

    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        VertexSet { bits }
    }

    pub fn from_ids(n: usize, ids: impl IntoIterator<Item = VertexId>) -> Self {
        let mut s = VertexSet::new(n);
        for v in ids {
            s.insert(v);
        }
        s
    }

    /// Size of the universe `[0, n)`.
    pub fn universe(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        self.bits.contains(v.0)
    }

    /// Returns whether `v` was newly inserted.
    #[inline]
    pub fn insert(&mut self, v: VertexId) -> bool {
        !self.bits.put(v.0)
    }

    pub fn remove(&mut self, v: VertexId) {
        self.bits.set(v.0, false);
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.bits.ones().map(VertexId)
    }

    pub fn to_vec(&self) -> Vec<VertexId> {
        self.iter().collect()
    }

    pub fn complement(&self) -> VertexSet {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        VertexSet { bits }
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.bits.is_subset(&other.bits)
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        self.bits.union_with(&other.bits);
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|v| v.0)).finish()
    }
}
