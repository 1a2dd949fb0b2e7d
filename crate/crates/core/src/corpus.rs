//! Seeded random games for tests and benchmarks.

use rand::seq::index::sample;
use rand::Rng;
use rand::SeedableRng;
use rand_xoshiro::Xoshiro256StarStar;

use crate::game::{GameGraph, PlayerClass, VertexId};

#[derive(Clone, Debug, PartialEq)]
pub struct CorpusParams {
    pub min_vertices: usize,
    pub max_vertices: usize,
    /// Upper bound on successors per non-terminal vertex.
    pub max_degree: usize,
    /// Rewards are integers in `0..=max_reward`.
    pub max_reward: u32,
    /// Chance that a non-terminal vertex gets a terminal among its successors.
    pub exit_bias: f64,
}

impl CorpusParams {
    pub fn small() -> Self {
        CorpusParams {
            min_vertices: 3,
            max_vertices: 8,
            max_degree: 3,
            max_reward: 4,
            exit_bias: 0.3,
        }
    }

    pub fn up_to(max_vertices: usize) -> Self {
        CorpusParams {
            max_vertices,
            ..Self::small()
        }
    }
}

/// A game with one or two terminals, mixed classes and positive-weight
/// probabilistic rows. Vertex 0 is never terminal and is the initial vertex.
pub fn random_game(seed: u64, p: &CorpusParams) -> GameGraph {
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let n = rng.random_range(p.min_vertices.max(2)..=p.max_vertices.max(2));
    let k = if n >= 6 { rng.random_range(1..=2) } else { 1 };
    let terminal: Vec<usize> = (n - k..n).collect();
    let mut class = Vec::with_capacity(n);
    let mut succ = Vec::with_capacity(n);
    let mut reward = Vec::with_capacity(n);
    for v in 0..n {
        if terminal.contains(&v) {
            class.push(PlayerClass::Prob);
            succ.push(vec![(VertexId(v), 1.0)]);
            reward.push(0.0);
            continue;
        }
        let c = match rng.random_range(0..3) {
            0 => PlayerClass::Max,
            1 => PlayerClass::Min,
            _ => PlayerClass::Prob,
        };
        let mut targets: Vec<usize> = loop {
            let d = rng.random_range(1..=p.max_degree.min(n));
            let t = sample(&mut rng, n, d).into_vec();
            if t != [v] {
                break t;
            }
        };
        if rng.random_bool(p.exit_bias) && !targets.iter().any(|t| terminal.contains(t)) {
            let exit = terminal[rng.random_range(0..k)];
            if targets.len() < p.max_degree {
                targets.push(exit);
            } else {
                targets[0] = exit;
            }
        }
        targets.sort_unstable();
        targets.dedup();
        let row = match c {
            PlayerClass::Prob => {
                let w: Vec<u32> = targets.iter().map(|_| rng.random_range(1..=4)).collect();
                let total: u32 = w.iter().sum();
                targets.iter().zip(&w).map(|(&t, &x)| (VertexId(t), x as f64 / total as f64)).collect()
            }
            _ => targets.iter().map(|&t| (VertexId(t), 1.0)).collect(),
        };
        class.push(c);
        succ.push(row);
        reward.push(rng.random_range(0..=p.max_reward) as f64);
    }
    GameGraph::new(class, succ, reward, VertexId(0)).expect("corpus game is well formed")
}

/// Games for consecutive seeds from `first`, without end.
pub fn corpus_iter(first: u64, p: &CorpusParams) -> impl Iterator<Item = (u64, GameGraph)> + '_ {
    (first..).map(move |s| (s, random_game(s, p)))
}

/// The first `count` seeds from `first` whose games satisfy `keep`.
pub fn filtered_corpus(
    first: u64,
    count: usize,
    p: &CorpusParams,
    mut keep: impl FnMut(&GameGraph) -> bool,
) -> Vec<(u64, GameGraph)> {
    corpus_iter(first, p).filter(|(_, g)| keep(g)).take(count).collect()
}

/// A long chain for benchmarks. Max only moves forward; Min and
/// probabilistic vertices may also jump back, so the game stops under
/// fairness but not under every Min strategy.
pub fn layered_game(seed: u64, n: usize) -> GameGraph {
    let mut rng = Xoshiro256StarStar::seed_from_u64(seed);
    let n = n.max(2);
    let t = n - 1;
    let mut class = Vec::with_capacity(n);
    let mut succ = Vec::with_capacity(n);
    let mut reward = Vec::with_capacity(n);
    for v in 0..t {
        let c = match v % 3 {
            0 => PlayerClass::Max,
            1 => PlayerClass::Min,
            _ => PlayerClass::Prob,
        };
        let forward = v + 1;
        let back = rng.random_range(0..=v);
        let row = match c {
            PlayerClass::Prob => {
                if back == forward {
                    vec![(VertexId(forward), 1.0)]
                } else {
                    vec![(VertexId(back), 0.3), (VertexId(forward), 0.7)]
                }
            }
            PlayerClass::Max => {
                let mut r = vec![(VertexId(forward), 1.0), (VertexId((v + 2).min(t)), 1.0)];
                r.dedup();
                r
            }
            PlayerClass::Min => {
                let mut r = vec![(VertexId(back), 1.0), (VertexId(forward), 1.0)];
                r.dedup();
                r
            }
        };
        class.push(c);
        succ.push(row);
        reward.push(rng.random_range(0..=4) as f64);
    }
    class.push(PlayerClass::Prob);
    succ.push(vec![(VertexId(t), 1.0)]);
    reward.push(0.0);
    GameGraph::new(class, succ, reward, VertexId(0)).expect("layered game is well formed")
}
