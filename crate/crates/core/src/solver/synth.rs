//! Strategy extraction from a value vector.
//!
//! Max plays the smallest-id successor attaining the maximum. Min is
//! restricted to its value-optimal successors `post^min(v)` and, among
//! those, plays one that strictly lowers an attractor rank towards the
//! terminals. The rank is computed on the graph where Max keeps only
//! near-optimal moves and probabilistic vertices keep every edge:
//!
//! ```text
//! rank(t) = 0
//! rank(v) = 1 + min over allowed successors    v ∈ V2 ∪ VP
//! rank(v) = 1 + max over allowed successors    v ∈ V1
//! ```
//!
//! Inside any closed class of the resulting chain the minimal-rank
//! vertex would have to leave it, so every such class is terminal and
//! the Min strategy is fair.

use std::collections::VecDeque;

use thiserror::Error;

use crate::game::{DetMemorylessStrategy, GameGraph, PlayerClass, ValueVector, VertexId};

/// Relative slack for "attains the optimum" comparisons.
pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SynthError {
    #[error("{0} has no rank towards the terminals along optimal moves")]
    Unranked(VertexId),
}

fn within(a: f64, b: f64, tol: f64, scale: f64) -> bool {
    (a - b).abs() <= tol * scale.abs().max(1.0)
}

/// Successors (ascending id) of a Min vertex attaining `r(v) + x(v')` within `tol` of
/// the best such sum.
pub fn post_min(game: &GameGraph, values: &ValueVector, v: VertexId, tol: f64) -> Vec<VertexId> {
    let best = game.post(v).map(|w| values[w]).fold(f64::INFINITY, f64::min);
    let scale = values[v];
    game.post(v)
        .filter(|&w| values[w] <= best || within(values[w], best, tol, scale))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Successors (ascending id) of a Max vertex attaining the maximum within `tol`.
pub fn post_max(game: &GameGraph, values: &ValueVector, v: VertexId, tol: f64) -> Vec<VertexId> {
    let best = game.post(v).map(|w| values[w]).fold(f64::NEG_INFINITY, f64::max);
    let scale = values[v];
    game.post(v)
        .filter(|&w| values[w] >= best || within(values[w], best, tol, scale))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Attractor ranks over `allowed` edges (one list per vertex; terminal
/// entries are ignored). Max vertices need every allowed successor
/// ranked, the others need one. `None` marks vertices without a rank.
pub fn distances_to_terminal(game: &GameGraph, allowed: &[Vec<VertexId>]) -> Vec<Option<usize>> {
    let n = game.num_vertices();
    let mut rev: Vec<Vec<VertexId>> = vec![Vec::new(); n];
    for v in game.vertices().filter(|&v| !game.is_terminal(v)) {
        for &w in &allowed[v.0] {
            rev[w.0].push(v);
        }
    }
    let mut missing: Vec<usize> = game
        .vertices()
        .map(|v| match game.class(v) {
            PlayerClass::Max => allowed[v.0].len(),
            _ => 1,
        })
        .collect();
    let mut rank = vec![None; n];
    let mut queue = VecDeque::new();
    for t in game.terminals().iter() {
        rank[t.0] = Some(0);
        queue.push_back(t);
    }
    // FIFO order pops ranks in non-decreasing order, so the last
    // successor to settle a Max vertex carries its maximal rank.
    while let Some(w) = queue.pop_front() {
        let next = rank[w.0].expect("queued vertices are ranked") + 1;
        for &u in &rev[w.0] {
            if rank[u.0].is_some() {
                continue;
            }
            missing[u.0] -= 1;
            if missing[u.0] == 0 {
                rank[u.0] = Some(next);
                queue.push_back(u);
            }
        }
    }
    rank
}

/// Allowed edges for the rank computation.
pub fn optimal_edges(game: &GameGraph, values: &ValueVector, tol: f64) -> Vec<Vec<VertexId>> {
    game.vertices()
        .map(|v| {
            if game.is_terminal(v) {
                return Vec::new();
            }
            match game.class(v) {
                PlayerClass::Max => post_max(game, values, v, tol),
                PlayerClass::Min => post_min(game, values, v, tol),
                PlayerClass::Prob => game.post(v).collect(),
            }
        })
        .collect()
}

pub fn synthesize_max_strategy(game: &GameGraph, values: &ValueVector) -> DetMemorylessStrategy {
    synthesize_max_strategy_with(game, values, DEFAULT_TIE_TOLERANCE)
}

pub fn synthesize_max_strategy_with(
    game: &GameGraph,
    values: &ValueVector,
    tol: f64,
) -> DetMemorylessStrategy {
    DetMemorylessStrategy::from_pairs(
        PlayerClass::Max,
        game.decision_vertices(PlayerClass::Max)
            .into_iter()
            .map(|v| (v, post_max(game, values, v, tol)[0])),
    )
}

pub fn synthesize_min_fair_strategy(
    game: &GameGraph,
    values: &ValueVector,
) -> Result<DetMemorylessStrategy, SynthError> {
    synthesize_min_fair_strategy_with(game, values, DEFAULT_TIE_TOLERANCE)
}

pub fn synthesize_min_fair_strategy_with(
    game: &GameGraph,
    values: &ValueVector,
    tol: f64,
) -> Result<DetMemorylessStrategy, SynthError> {
    let allowed = optimal_edges(game, values, tol);
    let rank = distances_to_terminal(game, &allowed);
    let mut pairs = Vec::new();
    for v in game.decision_vertices(PlayerClass::Min) {
        let pick = allowed[v.0]
            .iter()
            .filter_map(|&w| rank[w.0].map(|r| (r, w)))
            .min()
            .ok_or(SynthError::Unranked(v))?;
        pairs.push((v, pick.1));
    }
    Ok(DetMemorylessStrategy::from_pairs(PlayerClass::Min, pairs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures::*;
    use crate::game::{DetMemorylessStrategy as Det, GameGraph};

    #[test]
    fn g1_strategies() {
        let g = g1();
        let x = ValueVector::new(vec![1.0, 0.0, 0.0]);
        let s1 = synthesize_max_strategy(&g, &x);
        let s2 = synthesize_min_fair_strategy(&g, &x).unwrap();
        assert_eq!(s1, Det::from_pairs(PlayerClass::Max, [(v(0), v(1))]));
        assert_eq!(s2, Det::from_pairs(PlayerClass::Min, [(v(1), v(2))]));
        let ranks = distances_to_terminal(&g, &optimal_edges(&g, &x, DEFAULT_TIE_TOLERANCE));
        assert_eq!(ranks, vec![Some(2), Some(1), Some(0)]);
    }

    #[test]
    fn chain_ranks() {
        let k = 6;
        let succ = (0..=k).map(|i| vec![(v((i + 1).min(k)), 1.0)]).collect();
        let g = GameGraph::new(vec![PlayerClass::Prob; k + 1], succ, vec![0.0; k + 1], v(0)).unwrap();
        let allowed: Vec<Vec<VertexId>> = g.vertices().map(|u| g.post(u).collect()).collect();
        let ranks = distances_to_terminal(&g, &allowed);
        let expect: Vec<Option<usize>> = (0..=k).map(|i| Some(k - i)).collect();
        assert_eq!(ranks, expect);
    }

    #[test]
    fn max_ties_go_to_smallest_id() {
        // 0 (Max) -> {1, 2}, both worth 3.
        let g = GameGraph::new(
            vec![PlayerClass::Max, PlayerClass::Prob, PlayerClass::Prob, PlayerClass::Prob],
            vec![vec![(v(2), 1.0), (v(1), 1.0)], vec![(v(3), 1.0)], vec![(v(3), 1.0)], vec![(v(3), 1.0)]],
            vec![0.0, 3.0, 3.0, 0.0],
            v(0),
        )
        .unwrap();
        let x = ValueVector::new(vec![3.0, 3.0, 3.0 + 1e-12, 0.0]);
        assert_eq!(synthesize_max_strategy(&g, &x).get(v(0)), Some(v(1)));
    }

    /// Min at b chooses between a and c, every value is 0, and Max at a
    /// may bounce back to b. Shortest-path choice at b would pick a and
    /// lose fairness; the rank rule must pick c.
    #[test]
    fn rank_rule_avoids_max_controlled_loops() {
        let (a, b, c, t) = (v(0), v(1), v(2), v(3));
        let g = GameGraph::new(
            vec![PlayerClass::Max, PlayerClass::Min, PlayerClass::Prob, PlayerClass::Prob],
            vec![vec![(b, 1.0), (t, 1.0)], vec![(a, 1.0), (c, 1.0)], vec![(t, 1.0)], vec![(t, 1.0)]],
            vec![0.0; 4],
            a,
        )
        .unwrap();
        let x = ValueVector::zeros(4);
        let s2 = synthesize_min_fair_strategy(&g, &x).unwrap();
        assert_eq!(s2.get(b), Some(c));
        assert!(crate::fairness::is_fair_memoryless(&g, &s2));
    }

    #[test]
    fn unrankable_min_vertex_is_an_error() {
        // 0 (Max) -> 1 and 1 (Min) -> 0: no route to t at all.
        let g = GameGraph::new(
            vec![PlayerClass::Max, PlayerClass::Min, PlayerClass::Prob],
            vec![vec![(v(1), 1.0)], vec![(v(0), 1.0)], vec![(v(2), 1.0)]],
            vec![0.0; 3],
            v(0),
        )
        .unwrap();
        let x = ValueVector::zeros(3);
        assert_eq!(
            synthesize_min_fair_strategy(&g, &x),
            Err(SynthError::Unranked(v(1)))
        );
    }
}
