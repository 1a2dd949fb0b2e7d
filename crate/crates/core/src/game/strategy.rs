use std::collections::BTreeMap;

use super::{GameGraph, PlayerClass, VertexId};

/// Anything that assigns a successor distribution to a player's vertices
/// independently of history.
pub trait MemorylessStrategy {
    fn owner(&self) -> PlayerClass;

    /// Distribution played at `v`, or `None` if `v` is not covered.
    fn row(&self, v: VertexId) -> Option<Vec<(VertexId, f64)>>;
}

/// Deterministic memoryless strategy: one successor per owned vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetMemorylessStrategy {
    owner: PlayerClass,
    choice: BTreeMap<VertexId, VertexId>,
}

impl DetMemorylessStrategy {
    pub fn new(owner: PlayerClass, choice: BTreeMap<VertexId, VertexId>) -> Self {
        DetMemorylessStrategy { owner, choice }
    }

    pub fn from_pairs(owner: PlayerClass, pairs: impl IntoIterator<Item = (VertexId, VertexId)>) -> Self {
        DetMemorylessStrategy {
            owner,
            choice: pairs.into_iter().collect(),
        }
    }

    /// Picks the smallest-id successor at every decision vertex.
    pub fn first_choice(game: &GameGraph, owner: PlayerClass) -> Self {
        let choice = game
            .decision_vertices(owner)
            .into_iter()
            .filter_map(|v| game.post(v).min().map(|w| (v, w)))
            .collect();
        DetMemorylessStrategy { owner, choice }
    }

    pub fn owner(&self) -> PlayerClass {
        self.owner
    }

    pub fn get(&self, v: VertexId) -> Option<VertexId> {
        self.choice.get(&v).copied()
    }

    pub fn set(&mut self, v: VertexId, w: VertexId) {
        self.choice.insert(v, w);
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.choice.iter().map(|(&a, &b)| (a, b))
    }

    pub fn len(&self) -> usize {
        self.choice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choice.is_empty()
    }

    pub fn to_randomized(&self) -> RandMemorylessStrategy {
        RandMemorylessStrategy {
            owner: self.owner,
            choice: self.choice.iter().map(|(&v, &w)| (v, vec![(w, 1.0)])).collect(),
        }
    }
}

impl MemorylessStrategy for DetMemorylessStrategy {
    fn owner(&self) -> PlayerClass {
        self.owner
    }

    fn row(&self, v: VertexId) -> Option<Vec<(VertexId, f64)>> {
        self.get(v).map(|w| vec![(w, 1.0)])
    }
}

/// Randomized memoryless strategy.
#[derive(Clone, Debug, PartialEq)]
pub struct RandMemorylessStrategy {
    owner: PlayerClass,
    choice: BTreeMap<VertexId, Vec<(VertexId, f64)>>,
}

impl RandMemorylessStrategy {
    pub fn new(owner: PlayerClass, choice: BTreeMap<VertexId, Vec<(VertexId, f64)>>) -> Self {
        RandMemorylessStrategy { owner, choice }
    }

    /// Uniform over `post(v)` at every decision vertex of `owner`.
    pub fn uniform(game: &GameGraph, owner: PlayerClass) -> Self {
        let choice = game
            .decision_vertices(owner)
            .into_iter()
            .map(|v| {
                let post: Vec<VertexId> = game.post(v).collect();
                let w = 1.0 / post.len() as f64;
                (v, post.into_iter().map(|t| (t, w)).collect())
            })
            .collect();
        RandMemorylessStrategy { owner, choice }
    }

    pub fn owner(&self) -> PlayerClass {
        self.owner
    }

    pub fn set(&mut self, v: VertexId, row: Vec<(VertexId, f64)>) {
        self.choice.insert(v, row);
    }

    pub fn get(&self, v: VertexId) -> Option<&[(VertexId, f64)]> {
        self.choice.get(&v).map(Vec::as_slice)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, &[(VertexId, f64)])> + '_ {
        self.choice.iter().map(|(&v, r)| (v, r.as_slice()))
    }
}

impl MemorylessStrategy for RandMemorylessStrategy {
    fn owner(&self) -> PlayerClass {
        self.owner
    }

    fn row(&self, v: VertexId) -> Option<Vec<(VertexId, f64)>> {
        self.choice.get(&v).cloned()
    }
}
