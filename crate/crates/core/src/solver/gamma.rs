//! The one-step operator
//!
//! ```text
//! Γ(f)(v) = 0                              v terminal
//!         = r(v) + max_{v'} f(v')          v ∈ V1
//!         = r(v) + min_{v'} f(v')          v ∈ V2
//!         = r(v) + Σ δ(v)(v') f(v')        v ∈ VP
//! ```
//!
//! Γ is monotone: `f ≤ g` pointwise implies `Γ(f) ≤ Γ(g)`.

use rayon::prelude::*;

use crate::game::{GameGraph, PlayerClass, ValueVector, VertexId};

/// Γ at a single vertex.
#[inline]
pub fn gamma_at(game: &GameGraph, f: &[f64], v: VertexId) -> f64 {
    if game.is_terminal(v) {
        return 0.0;
    }
    let succ = game.succ(v);
    let step = match game.class(v) {
        PlayerClass::Max => succ.iter().map(|e| f[e.0 .0]).fold(f64::NEG_INFINITY, f64::max),
        PlayerClass::Min => succ.iter().map(|e| f[e.0 .0]).fold(f64::INFINITY, f64::min),
        PlayerClass::Prob => succ.iter().map(|&(w, p)| p * f[w.0]).sum(),
    };
    game.reward(v) + step
}

pub fn gamma_apply(game: &GameGraph, f: &ValueVector) -> ValueVector {
    let mut out = ValueVector::zeros(game.num_vertices());
    gamma_apply_into(game, f.as_slice(), out.as_mut_slice());
    out
}

pub fn gamma_apply_into(game: &GameGraph, f: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        *o = gamma_at(game, f, VertexId(i));
    }
}

/// Same as [`gamma_apply_into`], split across the current rayon pool.
pub fn gamma_apply_into_par(game: &GameGraph, f: &[f64], out: &mut [f64]) {
    out.par_iter_mut()
        .with_min_len(4096)
        .enumerate()
        .for_each(|(i, o)| *o = gamma_at(game, f, VertexId(i)));
}
