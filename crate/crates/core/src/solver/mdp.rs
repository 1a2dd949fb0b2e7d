//! Exact maximal expected total reward of an MDP by policy iteration, and
//! the upper bound that seeds value iteration.

use thiserror::Error;

use super::linear::{linear_solve_mc_expected_reward, LinearError};
use crate::game::{
    DetMemorylessStrategy, GameError, GameGraph, InducedMdp, PlayerClass, RandMemorylessStrategy,
    ValueVector, VertexId,
};

/// Improvement below this (relative) does not switch a policy.
pub const IMPROVEMENT_TOLERANCE: f64 = 1e-12;
pub const MAX_POLICY_ROUNDS: usize = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MdpError {
    #[error("the MDP still has {0} choices; expected Max")]
    NotMaxMdp(PlayerClass),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("policy evaluation failed: {0}")]
    Linear(#[from] LinearError),
    #[error("policy iteration did not stabilise within {0} rounds")]
    NoFixpoint(usize),
}

/// Value of the best Max policy. Starts from the smallest-id choice and
/// switches each vertex to its smallest-id strictly improving successor.
pub fn mdp_exact_value_max(mdp: &InducedMdp) -> Result<ValueVector, MdpError> {
    if mdp.player() != PlayerClass::Max {
        return Err(MdpError::NotMaxMdp(mdp.player()));
    }
    let g = mdp.graph();
    let none = DetMemorylessStrategy::from_pairs(PlayerClass::Min, []);
    let mut policy = DetMemorylessStrategy::first_choice(g, PlayerClass::Max);
    for _ in 0..MAX_POLICY_ROUNDS {
        let x = linear_solve_mc_expected_reward(&g.induce_chain(&policy, &none)?)?;
        let mut changed = false;
        for v in g.decision_vertices(PlayerClass::Max) {
            let cur = x[policy.get(v).expect("policy covers decision vertices")];
            let slack = IMPROVEMENT_TOLERANCE * cur.abs().max(1.0);
            if let Some(w) = g.post(v).find(|&w| x[w] > cur + slack) {
                policy.set(v, w);
                changed = true;
            }
        }
        if !changed {
            return Ok(x);
        }
    }
    Err(MdpError::NoFixpoint(MAX_POLICY_ROUNDS))
}

/// `(1 + margin)` times the Max-optimal value of the MDP obtained by
/// fixing the uniform Min strategy. The uniform strategy is fair, so
/// this bounds the game value from above; it is also a pre-fixpoint of
/// Γ, which keeps the clamped iteration descending.
pub fn upper_bound_vector(game: &GameGraph, margin: f64) -> Result<ValueVector, MdpError> {
    let uniform = RandMemorylessStrategy::uniform(game, PlayerClass::Min);
    let mdp = game.induce_mdp(&uniform)?;
    let mut x = mdp_exact_value_max(&mdp)?;
    for (i, val) in x.as_mut_slice().iter_mut().enumerate() {
        *val = if game.is_terminal(VertexId(i)) {
            0.0
        } else {
            *val * (1.0 + margin)
        };
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures::*;

    #[test]
    fn g1_upper_bound() {
        // uniform at v1: x1 = x0 / 2, x0 = 1 + x1  =>  x0 = 2, x1 = 1
        let x = upper_bound_vector(&g1(), 0.0).unwrap();
        assert!((x[v(0)] - 2.0).abs() < 1e-12);
        assert!((x[v(1)] - 1.0).abs() < 1e-12);
        assert_eq!(x[v(2)], 0.0);
        let y = upper_bound_vector(&g1(), 0.5).unwrap();
        assert!((y[v(0)] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn policy_iteration_picks_better_branch() {
        // 0 (Max) -> {1, 2}; 1 reward 5 -> t; 2 reward 1 -> t; 3 = t.
        let g = GameGraph::new(
            vec![PlayerClass::Max, PlayerClass::Prob, PlayerClass::Prob, PlayerClass::Prob],
            vec![
                vec![(VertexId(1), 1.0), (VertexId(2), 1.0)],
                vec![(VertexId(3), 1.0)],
                vec![(VertexId(3), 1.0)],
                vec![(VertexId(3), 1.0)],
            ],
            vec![0.0, 5.0, 1.0, 0.0],
            VertexId(0),
        )
        .unwrap();
        let none = DetMemorylessStrategy::from_pairs(PlayerClass::Min, []);
        let x = mdp_exact_value_max(&g.induce_mdp(&none).unwrap()).unwrap();
        assert_eq!(x.as_slice(), &[5.0, 5.0, 1.0, 0.0]);
    }

    #[test]
    fn non_stopping_mdp_is_an_error() {
        assert!(matches!(
            upper_bound_vector(&g3(), 0.0),
            Err(MdpError::Linear(LinearError::NoTerminalReachable(_)))
        ));
    }
}
