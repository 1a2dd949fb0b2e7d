//! A small guarded-command language for turn-based stochastic games and
//! its explicit-state compiler.
//!
//! ```text
//! const int W = 4;
//! const double P = 0.1;
//! const int[][] MOVES = [[0, 1], [2, 1]];
//! player1 [go, done];
//! player2 [stall];
//! module m
//!   x : [0..W] init 0;
//!   [go]    x < W -> (1-P) : (x'=x+1) + P : true;
//!   [done]  x = W -> true;
//! endmodule
//! rewards x < W : 1; endrewards
//! ```
//!
//! Every label belongs to one player; a reachable state may enable
//! commands of only one of them. Multi-branch commands go through a
//! fresh probabilistic vertex with reward 0. `%` is the non-negative
//! remainder and `/` always yields a real. Tables index as `T[i][j]`
//! or `T[i, j]`. A branch without a probability has probability 1.

mod ast;
mod compile;
mod eval;
mod lexer;
mod parser;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;
use thiserror::Error;

pub use ast::ModelAst;
pub use compile::{compile, CompileOptions};
pub use lexer::Pos;
pub use parser::parse;

use crate::game::{GameGraph, VertexId};
use crate::jsonfmt::OrderedMap;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: {msg}")]
    Declaration { pos: Pos, msg: String },
    #[error("{pos}: {msg}")]
    Eval { pos: Pos, msg: String },
    #[error("state {state}: {kind}")]
    State { state: String, kind: StateErrorKind },
    #[error("state space exceeds {limit} vertices")]
    TooLarge { limit: usize },
    #[error("compiled game is malformed: {0}")]
    Internal(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateErrorKind {
    #[error("no command is enabled")]
    Deadlock,
    #[error("commands of both players are enabled ([{first}] and [{second}] at {at})")]
    MixedPlayers { first: String, second: String, at: Pos },
    #[error("[{label}] has probabilities summing to {sum}")]
    RowSum { label: String, sum: f64 },
    #[error("[{label}] has probability {prob}")]
    BadProbability { label: String, prob: f64 },
    #[error("[{label}] sets {var} to {value}, outside its range")]
    OutOfRange { label: String, var: String, value: i64 },
    #[error("reward {0} is negative or not finite")]
    BadReward(f64),
    #[error("terminal state has reward {0}")]
    TerminalReward(f64),
}

/// What a compiled vertex stands for.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StateTag {
    /// A reachable valuation, in variable declaration order.
    Valuation(Vec<i64>),
    /// The probabilistic vertex introduced for `command` at `source`.
    Branch { source: VertexId, command: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompiledGame {
    pub game: GameGraph,
    pub var_names: Vec<String>,
    /// Indexed by vertex id.
    pub states: Vec<StateTag>,
}

#[derive(Clone)]
struct TagOut<'a>(&'a StateTag, &'a [String]);

impl Serialize for TagOut<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(None)?;
        match self.0 {
            StateTag::Valuation(vals) => {
                for (name, v) in self.1.iter().zip(vals) {
                    m.serialize_entry(name, v)?;
                }
            }
            StateTag::Branch { source, command } => {
                m.serialize_entry("source", &source.0)?;
                m.serialize_entry("command", command)?;
            }
        }
        m.end()
    }
}

#[derive(Serialize)]
struct CompiledOut<'a, G: Serialize> {
    #[serde(flatten)]
    game: G,
    states: OrderedMap<Vec<(usize, TagOut<'a>)>>,
}

impl CompiledGame {
    /// The canonical game JSON plus a `"states"` map from id to
    /// valuation (or to the source vertex and command of a branch).
    pub fn to_json(&self) -> String {
        serde_json::to_string(&CompiledOut {
            game: crate::game::game_value(&self.game),
            states: OrderedMap(
                self.states
                    .iter()
                    .enumerate()
                    .map(|(i, t)| (i, TagOut(t, &self.var_names)))
                    .collect(),
            ),
        })
        .expect("compiled game serializes")
    }

    /// Vertex of a valuation, if reachable.
    pub fn vertex_of(&self, valuation: &[i64]) -> Option<VertexId> {
        self.states
            .iter()
            .position(|t| matches!(t, StateTag::Valuation(v) if v == valuation))
            .map(VertexId)
    }

    /// Value of `var` at vertex `v`, if `v` is a valuation.
    pub fn var(&self, v: VertexId, var: &str) -> Option<i64> {
        let slot = self.var_names.iter().position(|n| n == var)?;
        match &self.states[v.0] {
            StateTag::Valuation(vals) => Some(vals[slot]),
            StateTag::Branch { .. } => None,
        }
    }
}

/// Parses and compiles in one step.
pub fn compile_str(src: &str, opts: &CompileOptions) -> Result<CompiledGame, ModelError> {
    compile(&parse(src)?, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{game_from_json, PlayerClass};

    fn build(src: &str) -> Result<CompiledGame, ModelError> {
        compile_str(src, &CompileOptions::default())
    }

    const G1: &str = "
        player1 [a, stop];
        player2 [b, c];
        module g
          s : [0..2] init 0;
          [a]    s=0 -> (s'=1);
          [b]    s=1 -> (s'=0);
          [c]    s=1 -> (s'=2);
          [stop] s=2 -> true;
        endmodule
        rewards s=0 : 1; endrewards";

    #[test]
    fn g1_as_a_model() {
        let c = build(G1).unwrap();
        let g = &c.game;
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.class(VertexId(0)), PlayerClass::Max);
        assert_eq!(g.class(VertexId(1)), PlayerClass::Min);
        assert!(g.is_terminal(VertexId(2)));
        assert_eq!(g.rewards(), &[1.0, 0.0, 0.0]);
        let s = crate::solver::solve(g, &Default::default()).unwrap();
        assert_eq!(s.values.as_slice(), &[1.0, 0.0, 0.0]);
    }

    #[test]
    fn split_command_gets_a_probabilistic_vertex() {
        let c = build(
            "player1 [a, z]; module m x : [0..1] init 0;
             [a] x=0 -> 0.5:(x'=0) + 0.5:(x'=1);
             [z] x=1 -> true; endmodule",
        )
        .unwrap();
        let g = &c.game;
        // 0: x=0 (Max), 1: branch vertex, 2: x=1
        assert_eq!(g.num_vertices(), 3);
        assert_eq!(g.succ(VertexId(0)), &[(VertexId(1), 1.0)]);
        assert_eq!(g.class(VertexId(1)), PlayerClass::Prob);
        assert_eq!(g.succ(VertexId(1)), &[(VertexId(0), 0.5), (VertexId(2), 0.5)]);
        assert_eq!(
            c.states[1],
            StateTag::Branch {
                source: VertexId(0),
                command: "a".into()
            }
        );
        assert_eq!(c.var(VertexId(2), "x"), Some(1));
    }

    #[test]
    fn branches_to_the_same_state_merge() {
        let c = build(
            "player1 [a, z]; module m x : [0..1] init 0;
             [a] x=0 -> 0.25:(x'=1) + 0.75:(x'=1);
             [z] x=1 -> true; endmodule",
        )
        .unwrap();
        assert_eq!(c.game.num_vertices(), 2);
        assert_eq!(c.game.succ(VertexId(0)), &[(VertexId(1), 1.0)]);
    }

    #[test]
    fn new_states_are_numbered_by_valuation() {
        let c = build(
            "player1 [a, b, z]; module m x : [0..3] init 0;
             [a] x=0 -> (x'=3);
             [b] x=0 -> (x'=1);
             [z] x>0 -> true; endmodule",
        )
        .unwrap();
        assert_eq!(c.var(VertexId(1), "x"), Some(1));
        assert_eq!(c.var(VertexId(2), "x"), Some(3));
    }

    #[test]
    fn compile_errors() {
        let deadlock = "player1 [a]; module m x : [0..1] init 0; [a] x=0 -> (x'=1); endmodule";
        assert!(matches!(build(deadlock), Err(ModelError::State { kind: StateErrorKind::Deadlock, .. })));
        let closed = compile_str(deadlock, &CompileOptions { close_deadlocks: true, ..Default::default() }).unwrap();
        assert!(closed.game.is_terminal(VertexId(1)));

        let rewarded = "player1 [a]; module m x : [0..1] init 0; [a] x=0 -> (x'=1); endmodule rewards x=1 : 2; endrewards";
        let opts = CompileOptions { close_deadlocks: true, ..Default::default() };
        assert!(matches!(
            compile_str(rewarded, &opts),
            Err(ModelError::State { kind: StateErrorKind::TerminalReward(_), .. })
        ));

        let mixed = "player1 [a]; player2 [b]; module m x : [0..1] init 0; [a] true -> true; [b] true -> true; endmodule";
        assert!(matches!(build(mixed), Err(ModelError::State { kind: StateErrorKind::MixedPlayers { .. }, .. })));

        let sum = "player1 [a]; module m x : [0..1] init 0; [a] x=0 -> 1.5 : (x'=1); endmodule";
        assert!(matches!(build(sum), Err(ModelError::State { kind: StateErrorKind::RowSum { .. }, .. })));

        let range = "player1 [a]; module m x : [0..1] init 0; [a] true -> (x'=x+1); endmodule";
        let err = build(range).unwrap_err();
        assert!(matches!(err, ModelError::State { kind: StateErrorKind::OutOfRange { .. }, .. }), "{err}");
        assert!(err.to_string().contains("(x=1)"), "{err}");

        let neg = "player1 [a]; module m x : [0..1] init 0; [a] true -> true; endmodule rewards true : -1; endrewards";
        assert!(matches!(build(neg), Err(ModelError::State { kind: StateErrorKind::BadReward(_), .. })));

        let big = "player1 [a]; module m x : [0..100] init 0; [a] true -> (x'=(x+1)%101); endmodule";
        let small = CompileOptions { max_vertices: 10, ..Default::default() };
        assert_eq!(compile_str(big, &small), Err(ModelError::TooLarge { limit: 10 }));
    }

    #[test]
    fn json_round_trip_and_states() {
        let c = build(G1).unwrap();
        let text = c.to_json();
        assert_eq!(game_from_json(&text).unwrap(), c.game);
        let j: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(j["states"]["1"]["s"], 1);
        assert!(text.starts_with("{\"n\":3,"), "{text}");
    }

    #[test]
    fn deterministic_bytes() {
        assert_eq!(build(G1).unwrap().to_json(), build(G1).unwrap().to_json());
    }
}
