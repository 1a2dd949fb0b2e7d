//! Greatest-fixed-point value iteration from above:
//! `f_{k+1} = min(f_k, Γ(f_k))` starting at an upper bound.

use super::gamma::{gamma_apply_into, gamma_apply_into_par};
use crate::game::{GameGraph, ValueVector};

#[derive(Clone, Debug, PartialEq)]
pub struct IterationOutcome {
    pub values: ValueVector,
    pub iterations: usize,
    /// `max |f_{k+1} - f_k| / max(‖f_{k+1}‖∞, 1)` at the last step.
    pub residual: f64,
    pub converged: bool,
}

pub fn value_iteration_gfp(
    game: &GameGraph,
    upper: &ValueVector,
    epsilon: f64,
    max_iter: usize,
) -> IterationOutcome {
    iterate(game, upper, epsilon, max_iter, false)
}

/// Like [`value_iteration_gfp`] but evaluates Γ on the current rayon pool.
pub fn value_iteration_gfp_par(
    game: &GameGraph,
    upper: &ValueVector,
    epsilon: f64,
    max_iter: usize,
) -> IterationOutcome {
    iterate(game, upper, epsilon, max_iter, true)
}

fn iterate(
    game: &GameGraph,
    upper: &ValueVector,
    epsilon: f64,
    max_iter: usize,
    parallel: bool,
) -> IterationOutcome {
    let mut f = upper.as_slice().to_vec();
    let mut next = vec![0.0; f.len()];
    let mut residual = f64::INFINITY;
    for k in 1..=max_iter {
        if parallel {
            gamma_apply_into_par(game, &f, &mut next);
        } else {
            gamma_apply_into(game, &f, &mut next);
        }
        let mut diff = 0.0f64;
        let mut norm = 0.0f64;
        for (n, &old) in next.iter_mut().zip(&f) {
            *n = n.min(old);
            diff = diff.max(old - *n);
            norm = norm.max(n.abs());
        }
        std::mem::swap(&mut f, &mut next);
        residual = diff / norm.max(1.0);
        if residual < epsilon {
            return IterationOutcome {
                values: ValueVector::new(f),
                iterations: k,
                residual,
                converged: true,
            };
        }
    }
    IterationOutcome {
        values: ValueVector::new(f),
        iterations: max_iter,
        residual,
        converged: false,
    }
}
