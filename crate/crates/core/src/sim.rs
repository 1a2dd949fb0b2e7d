//! Monte Carlo evaluation of memoryless strategy pairs.
//!
//! Episode `i` of a run seeded with `s` draws from
//! `Xoshiro256StarStar::seed_from_u64(s ^ i)` (SplitMix64 seeding).
//! A uniform variate is `(next_u64 >> 11) · 2⁻⁵³`; a row is sampled by
//! scanning its cumulative probabilities in stored order. Episodes are
//! independent, so results do not depend on how they are scheduled.

use rand::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use rayon::prelude::*;
use serde::Serialize;

use crate::game::{GameError, GameGraph, InducedChain, MemorylessStrategy, VertexId};
use crate::jsonfmt::F17;

pub const DEFAULT_STEP_CAP: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpisodeResult {
    /// Sum of the rewards of the vertices left before absorption.
    pub total_reward: f64,
    pub steps: u64,
    pub terminated: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    /// Mean over terminated episodes.
    pub mean: f64,
    /// Sample standard deviation over terminated episodes divided by the
    /// square root of their number.
    pub stderr: f64,
    pub episodes: u64,
    pub termination_rate: f64,
}

#[derive(Serialize)]
struct EstimateOut {
    mean: F17,
    stderr: F17,
    episodes: u64,
    termination_rate: F17,
}

impl Estimate {
    pub fn to_json(&self) -> String {
        crate::jsonfmt::to_pretty(&EstimateOut {
            mean: F17(self.mean),
            stderr: F17(self.stderr),
            episodes: self.episodes,
            termination_rate: F17(self.termination_rate),
        })
    }
}

pub fn rng_for_episode(seed: u64, episode: u64) -> Xoshiro256StarStar {
    Xoshiro256StarStar::seed_from_u64(seed ^ episode)
}

#[inline]
fn uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn sample(row: &[(VertexId, f64)], rng: &mut impl RngCore) -> VertexId {
    if row.len() == 1 {
        return row[0].0;
    }
    let u = uniform(rng);
    let mut acc = 0.0;
    for &(w, p) in row {
        acc += p;
        if u < acc {
            return w;
        }
    }
    // Rounding left `u` above the accumulated mass.
    row.iter().rev().find(|e| e.1 > 0.0).map_or(row[0].0, |e| e.0)
}

/// One walk on an already induced chain.
pub fn simulate_chain_episode(
    chain: &InducedChain,
    start: VertexId,
    rng: &mut impl RngCore,
    step_cap: u64,
) -> EpisodeResult {
    let mut v = start;
    let mut total = 0.0;
    let mut steps = 0;
    while !chain.is_terminal(v) {
        if steps == step_cap {
            return EpisodeResult {
                total_reward: total,
                steps,
                terminated: false,
            };
        }
        total += chain.reward(v);
        v = sample(chain.row(v), rng);
        steps += 1;
    }
    EpisodeResult {
        total_reward: total,
        steps,
        terminated: true,
    }
}

pub fn simulate_episode<A, B>(
    game: &GameGraph,
    sigma1: &A,
    sigma2: &B,
    rng: &mut impl RngCore,
    step_cap: u64,
) -> Result<EpisodeResult, GameError>
where
    A: MemorylessStrategy + ?Sized,
    B: MemorylessStrategy + ?Sized,
{
    let chain = game.induce_chain(sigma1, sigma2)?;
    Ok(simulate_chain_episode(&chain, game.initial(), rng, step_cap))
}

/// Runs `episodes` independent episodes from the initial vertex on the
/// current rayon pool.
pub fn estimate_value<A, B>(
    game: &GameGraph,
    sigma1: &A,
    sigma2: &B,
    episodes: u64,
    seed: u64,
) -> Result<Estimate, GameError>
where
    A: MemorylessStrategy + ?Sized,
    B: MemorylessStrategy + ?Sized,
{
    estimate_value_capped(game, sigma1, sigma2, episodes, seed, DEFAULT_STEP_CAP)
}

pub fn estimate_value_capped<A, B>(
    game: &GameGraph,
    sigma1: &A,
    sigma2: &B,
    episodes: u64,
    seed: u64,
    step_cap: u64,
) -> Result<Estimate, GameError>
where
    A: MemorylessStrategy + ?Sized,
    B: MemorylessStrategy + ?Sized,
{
    let chain = game.induce_chain(sigma1, sigma2)?;
    let start = game.initial();
    let results: Vec<EpisodeResult> = (0..episodes)
        .into_par_iter()
        .map(|i| simulate_chain_episode(&chain, start, &mut rng_for_episode(seed, i), step_cap))
        .collect();
    Ok(summarize(&results))
}

/// Folds episode results in index order.
pub fn summarize(results: &[EpisodeResult]) -> Estimate {
    let done: Vec<f64> = results
        .iter()
        .filter(|r| r.terminated)
        .map(|r| r.total_reward)
        .collect();
    let k = done.len() as f64;
    let mean = done.iter().sum::<f64>() / k;
    let stderr = if done.len() > 1 {
        let ss: f64 = done.iter().map(|x| (x - mean) * (x - mean)).sum();
        (ss / (k - 1.0)).sqrt() / k.sqrt()
    } else {
        0.0
    };
    Estimate {
        mean,
        stderr,
        episodes: results.len() as u64,
        termination_rate: if results.is_empty() { 0.0 } else { k / results.len() as f64 },
    }
}
