//! Quantitative solution of stopping-under-fairness games.
//!
//! [`solve`] validates the game, checks stopping under fairness, seeds
//! value iteration with [`upper_bound_vector`], iterates
//! `f ← min(f, Γ(f))` to the greatest fixed point and extracts a Max
//! strategy and a fair Min strategy.
//!
//! The stopping rule bounds the last step, not the distance to the
//! fixed point, so slowly mixing games can stop early. After convergence
//! the synthesized Min strategy is therefore evaluated exactly against a
//! best Max reply. That vector dominates the value; when it is also a
//! fixed point of Γ it is dominated by the greatest one, so it replaces
//! the iterate.

mod gamma;
mod iterate;
mod linear;
mod mdp;
mod synth;

use serde::Serialize;
use thiserror::Error;

pub use gamma::{gamma_apply, gamma_apply_into, gamma_apply_into_par, gamma_at};
pub use iterate::{value_iteration_gfp, value_iteration_gfp_par, IterationOutcome};
pub use linear::{linear_solve_mc_expected_reward, LinearError, DENSE_LIMIT};
pub use mdp::{mdp_exact_value_max, upper_bound_vector, MdpError};
pub use synth::{
    distances_to_terminal, optimal_edges, post_max, post_min, synthesize_max_strategy,
    synthesize_max_strategy_with, synthesize_min_fair_strategy, synthesize_min_fair_strategy_with,
    SynthError, DEFAULT_TIE_TOLERANCE,
};

use crate::fairness::is_stopping_under_fairness;
use crate::game::{DetMemorylessStrategy, GameGraph, PlayerClass, ValueVector, Violation, VertexSet};
use crate::jsonfmt::{OrderedMap, F17};

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    /// Relative stopping threshold of value iteration.
    pub epsilon: f64,
    pub max_iter: usize,
    /// The upper bound is scaled by `1 + margin`.
    pub margin: f64,
    /// Relative slack when matching optimal successors.
    pub tie_tolerance: f64,
    /// Worker threads for Γ; `1` keeps everything on the caller.
    pub threads: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            epsilon: 1e-6,
            max_iter: 1_000_000,
            margin: 0.0,
            tie_tolerance: DEFAULT_TIE_TOLERANCE,
            threads: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub values: ValueVector,
    pub sigma1: DetMemorylessStrategy,
    pub sigma2: DetMemorylessStrategy,
    pub iterations: usize,
    pub residual: f64,
    pub upper_bound: ValueVector,
    pub converged: bool,
    /// Whether `values` come from the exact evaluation of `sigma2`.
    pub refined: bool,
}

/// Relative slack of the fixed-point test on refined values.
pub const FIXPOINT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("invalid game: {}", join(.0))]
    Invalid(Vec<Violation>),
    #[error("game is not stopping under fairness ({} trapped vertices)", .witness.len())]
    NotStopping { witness: VertexSet },
    #[error("upper bound: {0}")]
    UpperBound(#[from] MdpError),
    #[error("value iteration stopped after {} iterations with residual {:e}", .partial.iterations, .partial.residual)]
    NonConvergence { partial: Box<Solution> },
    #[error("strategy synthesis: {0}")]
    Synthesis(#[from] SynthError),
    #[error("thread pool: {0}")]
    Threads(String),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

pub fn solve(game: &GameGraph, opts: &SolveOptions) -> Result<Solution, SolveError> {
    let violations = game.validate();
    if !violations.is_empty() {
        return Err(SolveError::Invalid(violations));
    }
    let report = is_stopping_under_fairness(game);
    if !report.stopping {
        return Err(SolveError::NotStopping {
            witness: report.witness,
        });
    }
    let upper = upper_bound_vector(game, opts.margin)?;
    let outcome = if opts.threads > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(opts.threads)
            .build()
            .map_err(|e| SolveError::Threads(e.to_string()))?;
        pool.install(|| value_iteration_gfp_par(game, &upper, opts.epsilon, opts.max_iter))
    } else {
        value_iteration_gfp(game, &upper, opts.epsilon, opts.max_iter)
    };
    let sigma1 = synthesize_max_strategy_with(game, &outcome.values, opts.tie_tolerance);
    let sigma2 = synthesize_min_fair_strategy_with(game, &outcome.values, opts.tie_tolerance);
    if !outcome.converged {
        // Ranks may be missing before convergence; report what exists.
        let sigma2 = sigma2.unwrap_or_else(|_| DetMemorylessStrategy::from_pairs(PlayerClass::Min, []));
        return Err(SolveError::NonConvergence {
            partial: Box::new(Solution {
                values: outcome.values,
                sigma1,
                sigma2,
                iterations: outcome.iterations,
                residual: outcome.residual,
                upper_bound: upper,
                converged: false,
                refined: false,
            }),
        });
    }
    let sigma2 = sigma2?;
    let mut solution = Solution {
        values: outcome.values,
        sigma1,
        sigma2,
        iterations: outcome.iterations,
        residual: outcome.residual,
        upper_bound: upper,
        converged: true,
        refined: false,
    };
    if let Some(exact) = evaluate_min_strategy(game, &solution.sigma2) {
        // Clamping only absorbs rounding: the value never exceeds the bound.
        let values = ValueVector::new(
            exact
                .iter()
                .zip(solution.upper_bound.iter())
                .map(|(x, u)| x.min(*u))
                .collect(),
        );
        if let Ok(sigma2) = synthesize_min_fair_strategy_with(game, &values, opts.tie_tolerance) {
            solution.sigma1 = synthesize_max_strategy_with(game, &values, opts.tie_tolerance);
            solution.sigma2 = sigma2;
            solution.values = values;
            solution.refined = true;
        }
    }
    Ok(solution)
}

/// Exact value of `sigma2` against a best Max reply, if that vector is a
/// fixed point of Γ.
fn evaluate_min_strategy(game: &GameGraph, sigma2: &DetMemorylessStrategy) -> Option<ValueVector> {
    let mdp = game.induce_mdp(sigma2).ok()?;
    let x = mdp_exact_value_max(&mdp).ok()?;
    let step = gamma_apply(game, &x);
    x.iter()
        .zip(step.iter())
        .all(|(a, b)| (a - b).abs() <= FIXPOINT_TOLERANCE * a.abs().max(1.0))
        .then_some(x)
}

#[derive(Serialize)]
struct SolutionOut {
    values: OrderedMap<Vec<(usize, F17)>>,
    sigma1: OrderedMap<Vec<(usize, usize)>>,
    sigma2: OrderedMap<Vec<(usize, usize)>>,
    iterations: usize,
    residual: F17,
    upper_bound: OrderedMap<Vec<(usize, F17)>>,
    converged: bool,
    refined: bool,
}

fn value_map(x: &ValueVector) -> OrderedMap<Vec<(usize, F17)>> {
    OrderedMap(x.iter().enumerate().map(|(i, &v)| (i, F17(v))).collect())
}

fn strategy_map(s: &DetMemorylessStrategy) -> OrderedMap<Vec<(usize, usize)>> {
    OrderedMap(s.iter().map(|(v, w)| (v.0, w.0)).collect())
}

impl Solution {
    /// Pretty JSON with ids as keys in ascending order.
    pub fn to_json(&self) -> String {
        crate::jsonfmt::to_pretty(&SolutionOut {
            values: value_map(&self.values),
            sigma1: strategy_map(&self.sigma1),
            sigma2: strategy_map(&self.sigma2),
            iterations: self.iterations,
            residual: F17(self.residual),
            upper_bound: value_map(&self.upper_bound),
            converged: self.converged,
            refined: self.refined,
        })
    }
}
