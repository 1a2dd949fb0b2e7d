//! Qualitative analysis under fairness of the minimizing player.
//!
//! `∃Pre_f(C)` holds at vertices sending positive mass into `C`.
//! `∀Pre_f(C)` holds at Min and probabilistic vertices sending positive
//! mass into `C`, and at Max vertices whose successors all lie in `C`.
//! A game stops under fairness iff `∃Pre_f*(V \ ∀Pre_f*(T))` is empty.
//!
//! [`check_via_uniform_mdp`] answers the same question by a different
//! route: fix the uniform Min strategy and look for end components that
//! avoid the terminals.

use serde::Serialize;

use crate::game::{
    DetMemorylessStrategy, GameGraph, PlayerClass, RandMemorylessStrategy, VertexId, VertexSet,
};
use crate::graph::maximal_end_components;

/// One application of `∀Pre_f`.
pub fn forall_pre_f(game: &GameGraph, c: &VertexSet) -> VertexSet {
    let mut out = VertexSet::new(game.num_vertices());
    for v in game.vertices() {
        let hit = match game.class(v) {
            PlayerClass::Max => game.post(v).all(|w| c.contains(w)),
            PlayerClass::Min | PlayerClass::Prob => game.post(v).any(|w| c.contains(w)),
        };
        if hit {
            out.insert(v);
        }
    }
    out
}

/// One application of `∃Pre_f`.
pub fn exists_pre_f(game: &GameGraph, c: &VertexSet) -> VertexSet {
    let mut out = VertexSet::new(game.num_vertices());
    for v in game.vertices() {
        if game.post(v).any(|w| c.contains(w)) {
            out.insert(v);
        }
    }
    out
}

/// Least `X` with `X = seed ∪ ∀Pre_f(X)`.
pub fn forall_pre_star(game: &GameGraph, seed: &VertexSet) -> VertexSet {
    let n = game.num_vertices();
    // Max vertices join once every successor has joined.
    let mut missing: Vec<usize> = game
        .vertices()
        .map(|v| match game.class(v) {
            PlayerClass::Max => game.post(v).count(),
            _ => 1,
        })
        .collect();
    let mut x = seed.clone();
    let mut work: Vec<VertexId> = seed.to_vec();
    while let Some(w) = work.pop() {
        for &u in game.pred(w) {
            if x.contains(u) || game.edge_prob(u, w) <= 0.0 {
                continue;
            }
            missing[u.0] -= 1;
            if missing[u.0] == 0 {
                x.insert(u);
                work.push(u);
            }
        }
    }
    debug_assert_eq!(x.universe(), n);
    x
}

/// Least `X` with `X = seed ∪ ∃Pre_f(X)`: everything that can reach
/// `seed` with positive probability.
pub fn exists_pre_star(game: &GameGraph, seed: &VertexSet) -> VertexSet {
    let mut x = seed.clone();
    let mut work: Vec<VertexId> = seed.to_vec();
    while let Some(w) = work.pop() {
        for &u in game.pred(w) {
            if !x.contains(u) && game.edge_prob(u, w) > 0.0 {
                x.insert(u);
                work.push(u);
            }
        }
    }
    x
}

/// The trap set `∃Pre_f*(V \ ∀Pre_f*(T))`.
fn trap_closure(game: &GameGraph) -> VertexSet {
    let attractor = forall_pre_star(game, &game.terminals());
    exists_pre_star(game, &attractor.complement())
}

/// Vertices from which every Max strategy and every fair Min strategy
/// reach a terminal almost surely.
pub fn almost_sure_vertices(game: &GameGraph) -> VertexSet {
    trap_closure(game).complement()
}

#[derive(Clone, Debug, PartialEq)]
pub struct StoppingReport {
    pub stopping: bool,
    /// The set `∃Pre_f*(V \ ∀Pre_f*(T))`; empty iff stopping.
    pub witness: VertexSet,
    /// A maximal end component inside the witness where Max can keep the
    /// play away from terminals while Min plays fairly.
    pub trapped_component: Option<Vec<VertexId>>,
}

pub fn is_stopping_under_fairness(game: &GameGraph) -> StoppingReport {
    let witness = trap_closure(game);
    let trapped_component = if witness.is_empty() {
        None
    } else {
        let mut within = witness.clone();
        for t in game.terminals().iter() {
            within.remove(t);
        }
        maximal_end_components(game, &within, PlayerClass::Max)
            .into_iter()
            .next()
    };
    StoppingReport {
        stopping: witness.is_empty(),
        witness,
        trapped_component,
    }
}

/// Fixes the uniform Min strategy and asks whether the resulting MDP
/// reaches a terminal almost surely under every Max strategy, i.e.
/// whether it has no end component among non-terminal vertices.
pub fn check_via_uniform_mdp(game: &GameGraph) -> bool {
    let uniform = RandMemorylessStrategy::uniform(game, PlayerClass::Min);
    let mdp = game
        .induce_mdp(&uniform)
        .expect("uniform strategy covers every Min vertex");
    let g = mdp.graph();
    let within = g.terminals().complement();
    maximal_end_components(g, &within, PlayerClass::Max).is_empty()
}

/// Whether a deterministic memoryless Min strategy is fair against every
/// Max strategy: no end component of the induced MDP outside the
/// terminals may contain a Min vertex with a successor outside it.
pub fn is_fair_memoryless(game: &GameGraph, min: &DetMemorylessStrategy) -> bool {
    let Ok(mdp) = game.induce_mdp(min) else {
        return false;
    };
    let g = mdp.graph();
    let within = g.terminals().complement();
    maximal_end_components(g, &within, PlayerClass::Max)
        .iter()
        .all(|ec| {
            let set = VertexSet::from_ids(game.num_vertices(), ec.iter().copied());
            ec.iter()
                .filter(|&&v| game.class(v) == PlayerClass::Min)
                .all(|&v| game.post(v).all(|w| set.contains(w)))
        })
}

/// JSON surface of the qualitative check.
#[derive(Serialize)]
pub struct FairnessJson {
    pub stopping_under_fairness: bool,
    pub witness: Vec<usize>,
    pub almost_sure: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trapped_component: Option<Vec<usize>>,
}

impl FairnessJson {
    pub fn from_game(game: &GameGraph) -> Self {
        let report = is_stopping_under_fairness(game);
        let almost_sure = report.witness.complement();
        FairnessJson {
            stopping_under_fairness: report.stopping,
            witness: report.witness.iter().map(|v| v.0).collect(),
            almost_sure: almost_sure.iter().map(|v| v.0).collect(),
            trapped_component: report
                .trapped_component
                .map(|c| c.into_iter().map(|v| v.0).collect()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures::*;

    fn set(g: &GameGraph, ids: &[usize]) -> VertexSet {
        VertexSet::from_ids(g.num_vertices(), ids.iter().map(|&i| v(i)))
    }

    #[test]
    fn forall_single_step_on_g1() {
        let g = g1();
        assert_eq!(forall_pre_f(&g, &set(&g, &[2])), set(&g, &[1, 2]));
        assert_eq!(forall_pre_f(&g, &set(&g, &[1, 2])), set(&g, &[0, 1, 2]));
        assert!(forall_pre_f(&g, &set(&g, &[])).is_empty());
    }

    #[test]
    fn exists_single_step() {
        let g = g3();
        // v0 -> v0', v0' -> v0
        assert_eq!(exists_pre_f(&g, &set(&g, &[0])), set(&g, &[1]));
        assert_eq!(exists_pre_f(&g, &set(&g, &[1])), set(&g, &[0]));
        assert!(exists_pre_f(&g, &set(&g, &[])).is_empty());
        assert_eq!(exists_pre_f(&g, &VertexSet::full(3)), VertexSet::full(3));
    }

    #[test]
    fn closures() {
        let g = g1();
        assert_eq!(forall_pre_star(&g, &g.terminals()), VertexSet::full(3));
        let g = g3();
        assert_eq!(forall_pre_star(&g, &g.terminals()), set(&g, &[2]));
        assert!(exists_pre_star(&g, &set(&g, &[])).is_empty());
    }

    #[test]
    fn almost_sure_sets() {
        assert_eq!(almost_sure_vertices(&g1()), VertexSet::full(3));
        let g = g3();
        assert_eq!(almost_sure_vertices(&g), set(&g, &[2]));
        let only_t = GameGraph::new(vec![PlayerClass::Prob], vec![vec![(v(0), 1.0)]], vec![0.0], v(0)).unwrap();
        assert_eq!(almost_sure_vertices(&only_t), VertexSet::full(1));
    }

    #[test]
    fn stopping_reports() {
        let r = is_stopping_under_fairness(&g1());
        assert!(r.stopping);
        assert!(r.witness.is_empty());
        assert!(r.trapped_component.is_none());

        let g = g3();
        let r = is_stopping_under_fairness(&g);
        assert!(!r.stopping);
        assert_eq!(r.witness, set(&g, &[0, 1]));
        assert_eq!(r.trapped_component, Some(vec![v(0), v(1)]));

        // Globally stopping: a probabilistic path straight into t.
        let g = GameGraph::new(
            vec![PlayerClass::Min, PlayerClass::Prob, PlayerClass::Prob],
            vec![vec![(v(1), 1.0), (v(2), 1.0)], vec![(v(2), 1.0)], vec![(v(2), 1.0)]],
            vec![1.0, 1.0, 0.0],
            v(0),
        )
        .unwrap();
        assert!(is_stopping_under_fairness(&g).stopping);
    }

    #[test]
    fn uniform_mdp_route() {
        assert!(check_via_uniform_mdp(&g1()));
        assert!(!check_via_uniform_mdp(&g3()));
        // Markov chain with a non-terminal BSCC {0, 1}.
        let g = GameGraph::new(
            vec![PlayerClass::Prob; 3],
            vec![vec![(v(1), 1.0)], vec![(v(0), 1.0)], vec![(v(2), 1.0)]],
            vec![0.0; 3],
            v(0),
        )
        .unwrap();
        assert!(!check_via_uniform_mdp(&g));
        assert!(!is_stopping_under_fairness(&g).stopping);
    }

    #[test]
    fn min_strategy_fairness_by_end_components() {
        let g = g1();
        let stop = DetMemorylessStrategy::from_pairs(PlayerClass::Min, [(v(1), v(2))]);
        let loop_ = DetMemorylessStrategy::from_pairs(PlayerClass::Min, [(v(1), v(0))]);
        assert!(is_fair_memoryless(&g, &stop));
        assert!(!is_fair_memoryless(&g, &loop_));
    }

    #[test]
    fn pre_operators_are_monotone_on_small_sets() {
        let g = g1();
        let subsets: Vec<VertexSet> = (0u32..8)
            .map(|m| set(&g, &(0..3).filter(|i| m >> i & 1 == 1).collect::<Vec<_>>()))
            .collect();
        for a in &subsets {
            for b in &subsets {
                if a.is_subset(b) {
                    assert!(forall_pre_f(&g, a).is_subset(&forall_pre_f(&g, b)));
                    assert!(exists_pre_f(&g, a).is_subset(&exists_pre_f(&g, b)));
                }
            }
        }
    }
}
