//! Explicit turn-based stochastic game graphs.
//!
//! A [`GameGraph`] partitions its vertices into Max (Player 1), Min
//! (Player 2) and probabilistic vertices. Player vertices move along
//! probability-one edges; probabilistic vertices carry a distribution.
//! A vertex is terminal when its only transition is a probability-one
//! self-loop, and terminals must carry reward zero.
//!
//! Games are immutable once built. All derived objects (induced MDPs and
//! Markov chains) are fresh values.

mod json;
mod set;
mod strategy;

use std::fmt;

use thiserror::Error;

pub use json::{game_from_json, game_to_json, GameJsonError};
pub(crate) use json::game_value;
pub use set::VertexSet;
pub use strategy::{DetMemorylessStrategy, MemorylessStrategy, RandMemorylessStrategy};

/// Absolute tolerance on probability row sums.
pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

/// Dense vertex index in `[0, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub usize);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl From<usize> for VertexId {
    fn from(i: usize) -> Self {
        VertexId(i)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PlayerClass {
    /// Player 1, maximizes total reward.
    Max,
    /// Player 2, minimizes total reward and is restricted to fair play.
    Min,
    /// Probabilistic vertex.
    Prob,
}

impl PlayerClass {
    pub fn as_str(self) -> &'static str {
        match self {
            PlayerClass::Max => "max",
            PlayerClass::Min => "min",
            PlayerClass::Prob => "prob",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "max" => Some(PlayerClass::Max),
            "min" => Some(PlayerClass::Min),
            "prob" => Some(PlayerClass::Prob),
            _ => None,
        }
    }
}

impl fmt::Display for PlayerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Structural errors detected while assembling a game or induced object.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GameError {
    #[error("game must have at least one vertex")]
    Empty,
    #[error("vertex tables disagree in length (classes {classes}, succ {succ}, reward {reward})")]
    LengthMismatch {
        classes: usize,
        succ: usize,
        reward: usize,
    },
    #[error("{from} has an edge to out-of-range vertex {to}")]
    EdgeOutOfRange { from: VertexId, to: usize },
    #[error("initial vertex {0} is out of range")]
    InitialOutOfRange(usize),
    #[error("strategy for {owner} has no choice at {vertex}")]
    MissingChoice { owner: PlayerClass, vertex: VertexId },
    #[error("strategy choice at {vertex} leaves post({vertex}): {target}")]
    ChoiceNotInPost { vertex: VertexId, target: VertexId },
    #[error("strategy is owned by {found}, expected {expected}")]
    WrongOwner {
        expected: PlayerClass,
        found: PlayerClass,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum ViolationKind {
    /// A player vertex lists an edge whose probability is not exactly 1.
    PlayerEdgeNotDirac { target: VertexId, prob: f64 },
    /// A player vertex lists the same successor twice.
    DuplicateSuccessor { target: VertexId },
    /// A probabilistic row does not sum to one.
    RowSum { sum: f64 },
    /// A probability outside `(0, 1]`.
    ProbabilityOutOfRange { target: VertexId, prob: f64 },
    /// `post(v)` is empty.
    NoSuccessor,
    /// Terminal vertex with non-zero reward.
    TerminalReward { reward: f64 },
    /// Negative or non-finite reward.
    BadReward { reward: f64 },
}

/// One broken model assumption, attached to the vertex that breaks it.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub vertex: VertexId,
    pub kind: ViolationKind,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.vertex;
        match &self.kind {
            ViolationKind::PlayerEdgeNotDirac { target, prob } => {
                write!(f, "{v}: player edge to {target} has probability {prob}, expected 1")
            }
            ViolationKind::DuplicateSuccessor { target } => {
                write!(f, "{v}: successor {target} listed twice")
            }
            ViolationKind::RowSum { sum } => write!(f, "{v}: row sums to {sum}"),
            ViolationKind::ProbabilityOutOfRange { target, prob } => {
                write!(f, "{v}: probability {prob} to {target} outside (0,1]")
            }
            ViolationKind::NoSuccessor => write!(f, "{v}: empty successor set"),
            ViolationKind::TerminalReward { reward } => {
                write!(f, "{v}: terminal vertex with nonzero reward {reward}")
            }
            ViolationKind::BadReward { reward } => write!(f, "{v}: invalid reward {reward}"),
        }
    }
}

/// A finite turn-based stochastic game with vertex rewards.
#[derive(Clone, Debug, PartialEq)]
pub struct GameGraph {
    class: Vec<PlayerClass>,
    succ: Vec<Vec<(VertexId, f64)>>,
    reward: Vec<f64>,
    initial: VertexId,
    pred: Vec<Vec<VertexId>>,
}

impl GameGraph {
    /// Assembles a game from per-vertex tables. Only structural sanity
    /// (lengths, edge targets in range) is checked here; model
    /// assumptions are reported by [`GameGraph::validate`].
    pub fn new(
        class: Vec<PlayerClass>,
        succ: Vec<Vec<(VertexId, f64)>>,
        reward: Vec<f64>,
        initial: VertexId,
    ) -> Result<Self, GameError> {
        let n = class.len();
        if n == 0 {
            return Err(GameError::Empty);
        }
        if succ.len() != n || reward.len() != n {
            return Err(GameError::LengthMismatch {
                classes: n,
                succ: succ.len(),
                reward: reward.len(),
            });
        }
        if initial.0 >= n {
            return Err(GameError::InitialOutOfRange(initial.0));
        }
        let mut pred: Vec<Vec<VertexId>> = vec![Vec::new(); n];
        for (v, row) in succ.iter().enumerate() {
            for &(w, _) in row {
                if w.0 >= n {
                    return Err(GameError::EdgeOutOfRange {
                        from: VertexId(v),
                        to: w.0,
                    });
                }
                let p = &mut pred[w.0];
                if p.last() != Some(&VertexId(v)) {
                    p.push(VertexId(v));
                }
            }
        }
        Ok(GameGraph {
            class,
            succ,
            reward,
            initial,
            pred,
        })
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.class.len()
    }

    pub fn num_edges(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        (0..self.class.len()).map(VertexId)
    }

    #[inline]
    pub fn class(&self, v: VertexId) -> PlayerClass {
        self.class[v.0]
    }

    /// Outgoing transitions of `v` with their probabilities.
    #[inline]
    pub fn succ(&self, v: VertexId) -> &[(VertexId, f64)] {
        &self.succ[v.0]
    }

    /// `post(v)`: successors reached with positive probability.
    pub fn post(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        self.succ[v.0].iter().filter(|e| e.1 > 0.0).map(|e| e.0)
    }

    /// Distinct predecessors of `v`.
    #[inline]
    pub fn pred(&self, v: VertexId) -> &[VertexId] {
        &self.pred[v.0]
    }

    #[inline]
    pub fn reward(&self, v: VertexId) -> f64 {
        self.reward[v.0]
    }

    pub fn rewards(&self) -> &[f64] {
        &self.reward
    }

    #[inline]
    pub fn initial(&self) -> VertexId {
        self.initial
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        matches!(self.succ[v.0].as_slice(), [(w, p)] if *w == v && *p == 1.0)
    }

    /// Vertices whose only transition is a probability-one self-loop.
    pub fn terminals(&self) -> VertexSet {
        let mut t = VertexSet::new(self.num_vertices());
        for v in self.vertices() {
            if self.is_terminal(v) {
                t.insert(v);
            }
        }
        t
    }

    /// Vertices of the given class (terminals included).
    pub fn owned_by(&self, class: PlayerClass) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices().filter(move |&v| self.class(v) == class)
    }

    /// Non-terminal vertices owned by `class`; these are the vertices a
    /// memoryless strategy for that player must cover.
    pub fn decision_vertices(&self, class: PlayerClass) -> Vec<VertexId> {
        self.owned_by(class).filter(|&v| !self.is_terminal(v)).collect()
    }

    /// Total probability of moving from `v` to `w` in one step.
    pub fn edge_prob(&self, v: VertexId, w: VertexId) -> f64 {
        self.succ[v.0].iter().filter(|e| e.0 == w).map(|e| e.1).sum()
    }

    /// Mass that `v`'s row places on `set`.
    pub fn mass_into(&self, v: VertexId, set: &VertexSet) -> f64 {
        self.succ[v.0]
            .iter()
            .filter(|(w, _)| set.contains(*w))
            .map(|(_, p)| p)
            .sum()
    }

    /// Checks every model assumption, returning one entry per breach.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for v in self.vertices() {
            let row = self.succ(v);
            let push = |out: &mut Vec<Violation>, kind| out.push(Violation { vertex: v, kind });
            if row.is_empty() {
                push(&mut out, ViolationKind::NoSuccessor);
            }
            for &(w, p) in row {
                if !(p > 0.0 && p <= 1.0) {
                    push(
                        &mut out,
                        ViolationKind::ProbabilityOutOfRange { target: w, prob: p },
                    );
                }
            }
            match self.class(v) {
                PlayerClass::Max | PlayerClass::Min => {
                    let mut seen: Vec<VertexId> = Vec::with_capacity(row.len());
                    for &(w, p) in row {
                        if p != 1.0 && p > 0.0 && p <= 1.0 {
                            push(
                                &mut out,
                                ViolationKind::PlayerEdgeNotDirac { target: w, prob: p },
                            );
                        }
                        if seen.contains(&w) {
                            push(&mut out, ViolationKind::DuplicateSuccessor { target: w });
                        } else {
                            seen.push(w);
                        }
                    }
                }
                PlayerClass::Prob => {
                    if !row.is_empty() {
                        let sum: f64 = row.iter().map(|e| e.1).sum();
                        if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                            push(&mut out, ViolationKind::RowSum { sum });
                        }
                    }
                }
            }
            let r = self.reward(v);
            if !(r.is_finite() && r >= 0.0) {
                push(&mut out, ViolationKind::BadReward { reward: r });
            } else if self.is_terminal(v) && r != 0.0 {
                push(&mut out, ViolationKind::TerminalReward { reward: r });
            }
        }
        out
    }

    /// Fixes a memoryless strategy of one player. Its vertices become
    /// probabilistic with the strategy's rows; all else is unchanged.
    pub fn induce_mdp<S: MemorylessStrategy + ?Sized>(
        &self,
        strategy: &S,
    ) -> Result<InducedMdp, GameError> {
        let owner = strategy.owner();
        let mut class = self.class.clone();
        let mut succ = self.succ.clone();
        for v in self.owned_by(owner) {
            if self.is_terminal(v) {
                class[v.0] = PlayerClass::Prob;
                continue;
            }
            let row = strategy
                .row(v)
                .ok_or(GameError::MissingChoice { owner, vertex: v })?;
            self.check_row(v, &row)?;
            class[v.0] = PlayerClass::Prob;
            succ[v.0] = row;
        }
        let remaining = match owner {
            PlayerClass::Max => PlayerClass::Min,
            PlayerClass::Min => PlayerClass::Max,
            PlayerClass::Prob => {
                return Err(GameError::WrongOwner {
                    expected: PlayerClass::Min,
                    found: PlayerClass::Prob,
                })
            }
        };
        let game = GameGraph::new(class, succ, self.reward.clone(), self.initial)?;
        Ok(InducedMdp {
            game,
            player: remaining,
        })
    }

    /// The Markov chain left after fixing both players' memoryless
    /// strategies.
    pub fn induce_chain<A, B>(&self, max: &A, min: &B) -> Result<InducedChain, GameError>
    where
        A: MemorylessStrategy + ?Sized,
        B: MemorylessStrategy + ?Sized,
    {
        for (s, expected) in [
            (max.owner(), PlayerClass::Max),
            (min.owner(), PlayerClass::Min),
        ] {
            if s != expected {
                return Err(GameError::WrongOwner { expected, found: s });
            }
        }
        let mut rows = Vec::with_capacity(self.num_vertices());
        for v in self.vertices() {
            let row = match self.class(v) {
                _ if self.is_terminal(v) => vec![(v, 1.0)],
                PlayerClass::Prob => self.succ(v).to_vec(),
                c => {
                    let row = if c == PlayerClass::Max {
                        max.row(v)
                    } else {
                        min.row(v)
                    }
                    .ok_or(GameError::MissingChoice { owner: c, vertex: v })?;
                    self.check_row(v, &row)?;
                    row
                }
            };
            rows.push(row);
        }
        Ok(InducedChain {
            rows,
            reward: self.reward.clone(),
            terminal: self.vertices().map(|v| self.is_terminal(v)).collect(),
        })
    }

    fn check_row(&self, v: VertexId, row: &[(VertexId, f64)]) -> Result<(), GameError> {
        for &(w, p) in row {
            if p > 0.0 && !self.post(v).any(|x| x == w) {
                return Err(GameError::ChoiceNotInPost {
                    vertex: v,
                    target: w,
                });
            }
        }
        Ok(())
    }

    /// Reinterprets the game as a Markov chain. Only meaningful when
    /// both player classes are empty (or every player vertex has a
    /// single successor).
    pub fn as_chain(&self) -> InducedChain {
        InducedChain {
            rows: self.succ.clone(),
            reward: self.reward.clone(),
            terminal: self.vertices().map(|v| self.is_terminal(v)).collect(),
        }
    }
}

/// A game with one player's strategy fixed.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedMdp {
    game: GameGraph,
    player: PlayerClass,
}

impl InducedMdp {
    /// The player class that still makes choices.
    pub fn player(&self) -> PlayerClass {
        self.player
    }

    pub fn graph(&self) -> &GameGraph {
        &self.game
    }

    pub fn into_graph(self) -> GameGraph {
        self.game
    }
}

/// A finite Markov chain with vertex rewards. Terminal flags are
/// inherited from the originating game.
#[derive(Clone, Debug, PartialEq)]
pub struct InducedChain {
    rows: Vec<Vec<(VertexId, f64)>>,
    reward: Vec<f64>,
    terminal: Vec<bool>,
}

impl InducedChain {
    pub fn new(rows: Vec<Vec<(VertexId, f64)>>, reward: Vec<f64>, terminal: Vec<bool>) -> Self {
        assert_eq!(rows.len(), reward.len());
        assert_eq!(rows.len(), terminal.len());
        InducedChain {
            rows,
            reward,
            terminal,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, v: VertexId) -> &[(VertexId, f64)] {
        &self.rows[v.0]
    }

    pub fn reward(&self, v: VertexId) -> f64 {
        self.reward[v.0]
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.terminal[v.0]
    }

    /// Positive-probability successor lists, for graph algorithms.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        self.rows
            .iter()
            .map(|r| r.iter().filter(|e| e.1 > 0.0).map(|e| e.0 .0).collect())
            .collect()
    }
}

/// Per-vertex non-negative reals.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueVector(Vec<f64>);

impl ValueVector {
    pub fn new(values: Vec<f64>) -> Self {
        ValueVector(values)
    }

    pub fn zeros(n: usize) -> Self {
        ValueVector(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    /// `self(v) <= other(v)` for every `v`.
    pub fn le(&self, other: &ValueVector) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn max_abs_diff(&self, other: &ValueVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<VertexId> for ValueVector {
    type Output = f64;
    fn index(&self, v: VertexId) -> &f64 {
        &self.0[v.0]
    }
}

impl std::ops::IndexMut<VertexId> for ValueVector {
    fn index_mut(&mut self, v: VertexId) -> &mut f64 {
        &mut self.0[v.0]
    }
}
