//! Canonical JSON form of a [`GameGraph`]:
//!
//! ```text
//! {"n":3,"initial":0,"vertices":[{"id":0,"class":"max","reward":...,"succ":[[1,...]]},...]}
//! ```
//!
//! Field order is fixed and probabilities use 17 significant digits.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{GameError, GameGraph, PlayerClass, VertexId};
use crate::jsonfmt::F17;

#[derive(Debug, Error)]
pub enum GameJsonError {
    #[error("malformed game JSON: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("vertex at position {position} has id {id}")]
    IdOrder { position: usize, id: usize },
    #[error("\"n\" is {declared} but {found} vertices are listed")]
    Count { declared: usize, found: usize },
    #[error("unknown vertex class {0:?}")]
    Class(String),
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Serialize)]
struct GameOut<'a> {
    n: usize,
    initial: usize,
    vertices: Vec<VertexOut<'a>>,
}

#[derive(Serialize)]
struct VertexOut<'a> {
    id: usize,
    class: &'a str,
    reward: F17,
    succ: Vec<(usize, F17)>,
}

#[derive(Deserialize)]
struct GameIn {
    n: usize,
    initial: usize,
    vertices: Vec<VertexIn>,
}

#[derive(Deserialize)]
struct VertexIn {
    id: usize,
    class: String,
    reward: f64,
    succ: Vec<(usize, f64)>,
}

pub(crate) fn game_value(game: &GameGraph) -> impl Serialize + '_ {
    GameOut {
        n: game.num_vertices(),
        initial: game.initial().0,
        vertices: game
            .vertices()
            .map(|v| VertexOut {
                id: v.0,
                class: game.class(v).as_str(),
                reward: F17(game.reward(v)),
                succ: game.succ(v).iter().map(|&(w, p)| (w.0, F17(p))).collect(),
            })
            .collect(),
    }
}

/// Compact canonical JSON, one line, no trailing newline.
pub fn game_to_json(game: &GameGraph) -> String {
    serde_json::to_string(&game_value(game)).expect("game serializes")
}

pub fn game_from_json(text: &str) -> Result<GameGraph, GameJsonError> {
    let parsed: GameIn = serde_json::from_str(text)?;
    if parsed.n != parsed.vertices.len() {
        return Err(GameJsonError::Count {
            declared: parsed.n,
            found: parsed.vertices.len(),
        });
    }
    let mut class = Vec::with_capacity(parsed.n);
    let mut succ = Vec::with_capacity(parsed.n);
    let mut reward = Vec::with_capacity(parsed.n);
    for (position, v) in parsed.vertices.into_iter().enumerate() {
        if v.id != position {
            return Err(GameJsonError::IdOrder { position, id: v.id });
        }
        class.push(PlayerClass::parse(&v.class).ok_or(GameJsonError::Class(v.class))?);
        succ.push(v.succ.into_iter().map(|(w, p)| (VertexId(w), p)).collect());
        reward.push(v.reward);
    }
    Ok(GameGraph::new(class, succ, reward, VertexId(parsed.initial))?)
}
