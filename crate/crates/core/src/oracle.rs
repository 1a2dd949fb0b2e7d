//! Brute-force ground truth for small games.
//!
//! Enumerates deterministic memoryless strategies, keeps the fair Min
//! strategies (by the bottom-SCC criterion against every deterministic
//! memoryless Max strategy) and evaluates every remaining pair exactly.

use thiserror::Error;

use crate::game::{
    DetMemorylessStrategy, GameError, GameGraph, InducedChain, MemorylessStrategy, PlayerClass,
    RandMemorylessStrategy, ValueVector, VertexId, VertexSet,
};
use crate::graph::bottom_sccs;
use crate::solver::{linear_solve_mc_expected_reward, LinearError, Solution};

/// Largest number of decision vertices per player.
pub const MAX_OWNED: usize = 12;
/// Largest number of strategy pairs (or support/strategy pairs) examined.
pub const MAX_PAIRS: u128 = 4_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("{class} owns {count} decision vertices; the oracle handles at most {MAX_OWNED}")]
    TooManyVertices { class: PlayerClass, count: usize },
    #[error("{0} strategy combinations exceed the oracle limit of {MAX_PAIRS}")]
    TooManyPairs(u128),
    #[error("no fair deterministic Min strategy exists")]
    NoFairStrategy,
    #[error("a fair pair does not terminate from {0}")]
    FairPairTrapped(VertexId),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Linear(#[from] LinearError),
}

/// Every deterministic memoryless strategy of one player, in
/// lexicographic order: the smallest vertex is the most significant
/// digit, successors ascend by id.
#[derive(Clone, Debug)]
pub struct StrategySpace {
    owner: PlayerClass,
    vertices: Vec<VertexId>,
    options: Vec<Vec<VertexId>>,
}

impl StrategySpace {
    pub fn new(game: &GameGraph, owner: PlayerClass) -> Result<Self, OracleError> {
        let vertices = game.decision_vertices(owner);
        if vertices.len() > MAX_OWNED {
            return Err(OracleError::TooManyVertices {
                class: owner,
                count: vertices.len(),
            });
        }
        let options = vertices
            .iter()
            .map(|&v| {
                let mut p: Vec<VertexId> = game.post(v).collect();
                p.sort_unstable();
                p.dedup();
                p
            })
            .collect();
        Ok(StrategySpace {
            owner,
            vertices,
            options,
        })
    }

    pub fn size(&self) -> u128 {
        self.options.iter().map(|o| o.len() as u128).product()
    }

    pub fn iter(&self) -> impl Iterator<Item = DetMemorylessStrategy> + '_ {
        odometer(self.options.iter().map(|o| o.len()).collect()).map(move |digits| {
            DetMemorylessStrategy::from_pairs(
                self.owner,
                digits
                    .iter()
                    .enumerate()
                    .map(|(i, &d)| (self.vertices[i], self.options[i][d])),
            )
        })
    }
}

/// All digit vectors below `radix`, last digit fastest.
fn odometer(radix: Vec<usize>) -> impl Iterator<Item = Vec<usize>> {
    let mut cur = radix.iter().all(|&r| r > 0).then(|| vec![0; radix.len()]);
    std::iter::from_fn(move || {
        let out = cur.clone()?;
        let mut next = out.clone();
        let mut i = radix.len();
        cur = loop {
            if i == 0 {
                break None;
            }
            i -= 1;
            next[i] += 1;
            if next[i] < radix[i] {
                break Some(next);
            }
            next[i] = 0;
        };
        Some(out)
    })
}

fn guard(count: u128) -> Result<(), OracleError> {
    if count > MAX_PAIRS {
        Err(OracleError::TooManyPairs(count))
    } else {
        Ok(())
    }
}

/// Whether some bottom SCC of `chain` avoids the terminals while every
/// Min vertex in it keeps all of its game successors inside. Such a
/// component is a fair trap.
fn has_fair_trap(game: &GameGraph, chain: &InducedChain) -> bool {
    bottom_sccs(&chain.adjacency()).iter().any(|b| {
        if b.iter().any(|&v| chain.is_terminal(VertexId(v))) {
            return false;
        }
        let set = VertexSet::from_ids(game.num_vertices(), b.iter().map(|&v| VertexId(v)));
        b.iter()
            .map(|&v| VertexId(v))
            .filter(|&v| game.class(v) == PlayerClass::Min)
            .all(|v| game.post(v).all(|w| set.contains(w)))
    })
}

/// Whether some bottom SCC of `chain` avoids the terminals and has a Min
/// vertex with a successor outside it.
fn has_unfair_trap(game: &GameGraph, chain: &InducedChain) -> bool {
    bottom_sccs(&chain.adjacency()).iter().any(|b| {
        if b.iter().any(|&v| chain.is_terminal(VertexId(v))) {
            return false;
        }
        let set = VertexSet::from_ids(game.num_vertices(), b.iter().map(|&v| VertexId(v)));
        b.iter()
            .map(|&v| VertexId(v))
            .filter(|&v| game.class(v) == PlayerClass::Min)
            .any(|v| game.post(v).any(|w| !set.contains(w)))
    })
}

fn fair_against_all<S: MemorylessStrategy>(
    game: &GameGraph,
    max: &StrategySpace,
    min: &S,
) -> Result<bool, OracleError> {
    for s1 in max.iter() {
        if has_unfair_trap(game, &game.induce_chain(&s1, min)?) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Fairness of a deterministic memoryless Min strategy: against every
/// deterministic memoryless Max strategy, each non-terminal bottom SCC
/// of the induced chain must contain every successor of its Min
/// vertices.
pub fn is_fair_det_strategy(game: &GameGraph, sigma2: &DetMemorylessStrategy) -> Result<bool, OracleError> {
    let max = StrategySpace::new(game, PlayerClass::Max)?;
    StrategySpace::new(game, PlayerClass::Min)?;
    guard(max.size())?;
    fair_against_all(game, &max, sigma2)
}

/// Every fair deterministic memoryless Min strategy, in enumeration order.
pub fn fair_min_strategies(game: &GameGraph) -> Result<Vec<DetMemorylessStrategy>, OracleError> {
    let max = StrategySpace::new(game, PlayerClass::Max)?;
    let min = StrategySpace::new(game, PlayerClass::Min)?;
    guard(max.size().saturating_mul(min.size()))?;
    let mut out = Vec::new();
    for s2 in min.iter() {
        if fair_against_all(game, &max, &s2)? {
            out.push(s2);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OracleOutcome {
    /// `max_{σ1} min_{fair σ2}` of the expected total reward, per vertex.
    pub values: ValueVector,
    /// Max strategy attaining the value at the initial vertex.
    pub sigma1: DetMemorylessStrategy,
    /// Best fair reply to `sigma1` at the initial vertex.
    pub sigma2: DetMemorylessStrategy,
    pub pairs: usize,
}

impl OracleOutcome {
    /// Same layout as a solver result; the upper bound slot repeats the
    /// values and the residual is zero.
    pub fn to_solution(&self) -> Solution {
        Solution {
            values: self.values.clone(),
            sigma1: self.sigma1.clone(),
            sigma2: self.sigma2.clone(),
            iterations: self.pairs,
            residual: 0.0,
            upper_bound: self.values.clone(),
            converged: true,
            refined: false,
        }
    }
}

pub fn oracle_solve(game: &GameGraph) -> Result<OracleOutcome, OracleError> {
    let n = game.num_vertices();
    let max = StrategySpace::new(game, PlayerClass::Max)?;
    let fair = fair_min_strategies(game)?;
    if fair.is_empty() {
        return Err(OracleError::NoFairStrategy);
    }
    let init = game.initial();
    let mut best = vec![f64::NEG_INFINITY; n];
    let mut best_init: Option<(f64, DetMemorylessStrategy, DetMemorylessStrategy)> = None;
    let mut pairs = 0;
    for s1 in max.iter() {
        let mut worst = vec![f64::INFINITY; n];
        let mut reply: Option<(f64, &DetMemorylessStrategy)> = None;
        for s2 in &fair {
            let chain = game.induce_chain(&s1, s2)?;
            let x = match linear_solve_mc_expected_reward(&chain) {
                Ok(x) => x,
                Err(LinearError::NoTerminalReachable(v)) => return Err(OracleError::FairPairTrapped(v)),
                Err(e) => return Err(e.into()),
            };
            pairs += 1;
            for (w, &xv) in worst.iter_mut().zip(x.iter()) {
                *w = w.min(xv);
            }
            if reply.is_none_or(|(r, _)| x[init] < r) {
                reply = Some((x[init], s2));
            }
        }
        for (b, &w) in best.iter_mut().zip(&worst) {
            *b = b.max(w);
        }
        if best_init.as_ref().is_none_or(|(b, _, _)| worst[init.0] > *b) {
            let (_, s2) = reply.expect("at least one fair strategy");
            best_init = Some((worst[init.0], s1, s2.clone()));
        }
    }
    let (_, sigma1, sigma2) = best_init.expect("Max strategy space is non-empty");
    Ok(OracleOutcome {
        values: ValueVector::new(best),
        sigma1,
        sigma2,
        pairs,
    })
}

pub fn oracle_value(game: &GameGraph) -> Result<ValueVector, OracleError> {
    Ok(oracle_solve(game)?.values)
}

/// Memoryless Min strategies given by their supports: each decision
/// vertex plays uniformly over a non-empty subset of its successors.
/// Deterministic strategies are the singleton supports.
fn support_strategies(game: &GameGraph) -> Result<Vec<RandMemorylessStrategy>, OracleError> {
    let vertices = game.decision_vertices(PlayerClass::Min);
    if vertices.len() > MAX_OWNED {
        return Err(OracleError::TooManyVertices {
            class: PlayerClass::Min,
            count: vertices.len(),
        });
    }
    let posts: Vec<Vec<VertexId>> = vertices
        .iter()
        .map(|&v| {
            let mut p: Vec<VertexId> = game.post(v).collect();
            p.sort_unstable();
            p.dedup();
            p
        })
        .collect();
    let count: u128 = posts
        .iter()
        .map(|p| (1u128 << p.len().min(100)) - 1)
        .product();
    guard(count)?;
    let radix: Vec<usize> = posts.iter().map(|p| (1usize << p.len()) - 1).collect();
    Ok(odometer(radix)
        .map(|digits| {
            let mut s = RandMemorylessStrategy::new(PlayerClass::Min, Default::default());
            for (i, &d) in digits.iter().enumerate() {
                let mask = d + 1;
                let support: Vec<VertexId> = posts[i]
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| mask >> j & 1 == 1)
                    .map(|(_, &w)| w)
                    .collect();
                let p = 1.0 / support.len() as f64;
                s.set(vertices[i], support.into_iter().map(|w| (w, p)).collect());
            }
            s
        })
        .collect())
}

/// Stopping under fairness by enumeration: no fair memoryless Min
/// strategy (ranging over all supports) and deterministic memoryless Max
/// strategy may leave a non-terminal bottom SCC.
pub fn oracle_stopping(game: &GameGraph) -> Result<bool, OracleError> {
    let max = StrategySpace::new(game, PlayerClass::Max)?;
    let supports = support_strategies(game)?;
    guard((supports.len() as u128).saturating_mul(max.size()))?;
    for s2 in &supports {
        let chains: Vec<InducedChain> = max
            .iter()
            .map(|s1| game.induce_chain(&s1, s2))
            .collect::<Result<_, _>>()?;
        if chains.iter().any(|c| has_unfair_trap(game, c)) {
            continue;
        }
        if chains.iter().any(|c| has_fair_trap(game, c)) {
            return Ok(false);
        }
    }
    Ok(true)
}
