//! Roborta on a grid against a traffic light.
//!
//! Variables `col`, `row` and `light` (0 red, 1 yellow, 2 green, 3 off).
//! The light (player 2) moves on red; Roborta (player 1) moves sideways
//! on yellow, forward on green and either way when the light is off.
//! Sideways moves wrap around and obey `MOVES[col][row]`: 0 left only,
//! 1 both, 2 right only. A failed robot move keeps the cell and hands the
//! turn back to the light, so the cell reward is collected again. The
//! game ends when Roborta leaves the last row.

use std::fmt::Write;

use rand::Rng;

use super::{real_literal, seeded_rng, CasegenError};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LightVersion {
    /// The light never fails.
    A,
    /// The light can fail while switching to green.
    B,
    /// The light can fail on every switch.
    C,
}

impl LightVersion {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "A" | "a" => Some(LightVersion::A),
            "B" | "b" => Some(LightVersion::B),
            "C" | "c" => Some(LightVersion::C),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RobortaConfig {
    pub width: usize,
    pub length: usize,
    /// Robot failure probability.
    pub p: f64,
    /// Light failure probability; ignored by version A.
    pub q: f64,
    pub version: LightVersion,
    pub seed: u64,
    /// `moves[col][row]`, entries in {0, 1, 2}.
    pub moves: Vec<Vec<u8>>,
    /// `rewards[col][row]`.
    pub rewards: Vec<Vec<u32>>,
}

/// Largest random cell reward.
pub const MAX_CELL_REWARD: u32 = 5;

/// Chance that a random cell allows only one sideways direction.
pub const RESTRICTED_CELL_PROB: f64 = 0.15;

impl RobortaConfig {
    /// Grid tables drawn from `seed`: all of `moves` in column-major
    /// order first, then all of `rewards`.
    pub fn random(width: usize, length: usize, p: f64, q: f64, version: LightVersion, seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let moves = (0..width)
            .map(|_| {
                (0..length)
                    .map(|_| match rng.random_bool(RESTRICTED_CELL_PROB) {
                        false => 1,
                        true if rng.random_bool(0.5) => 0,
                        true => 2,
                    })
                    .collect()
            })
            .collect();
        let rewards = (0..width)
            .map(|_| (0..length).map(|_| rng.random_range(0..=MAX_CELL_REWARD)).collect())
            .collect();
        RobortaConfig {
            width,
            length,
            p,
            q,
            version,
            seed,
            moves,
            rewards,
        }
    }

    pub fn validate(&self) -> Result<(), CasegenError> {
        let bad = |msg: String| Err(CasegenError::Invalid(msg));
        if self.width == 0 || self.length == 0 {
            return bad(format!("grid {}x{} is empty", self.width, self.length));
        }
        if !(0.0..1.0).contains(&self.p) {
            return bad(format!("robot failure probability {} is outside [0, 1)", self.p));
        }
        if self.version != LightVersion::A && !(0.0..1.0).contains(&self.q) {
            return bad(format!("light failure probability {} is outside [0, 1)", self.q));
        }
        let shaped = |lens: Vec<usize>| lens.len() == self.width && lens.iter().all(|&c| c == self.length);
        if !shaped(self.moves.iter().map(Vec::len).collect()) {
            return bad(format!("moves table is not {}x{}", self.width, self.length));
        }
        if !shaped(self.rewards.iter().map(Vec::len).collect()) {
            return bad(format!("rewards table is not {}x{}", self.width, self.length));
        }
        if let Some(m) = self.moves.iter().flatten().find(|&&m| m > 2) {
            return bad(format!("moves entry {m} is not 0, 1 or 2"));
        }
        Ok(())
    }
}

fn table<T: std::fmt::Display>(rows: &[Vec<T>]) -> String {
    let inner: Vec<String> = rows
        .iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().map(ToString::to_string).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[\n    {}\n  ]", inner.join(",\n    "))
}

pub fn gen_roborta(c: &RobortaConfig) -> Result<String, CasegenError> {
    c.validate()?;
    let mut s = String::new();
    let fails = |on: bool| on && c.version != LightVersion::A;
    let (q_yellow, q_green) = (fails(c.version == LightVersion::C), fails(true));

    writeln!(s, "// Roborta vs. the light, version {:?}, {}x{}, seed {}", c.version, c.width, c.length, c.seed).unwrap();
    writeln!(s, "const int WIDTH = {};", c.width).unwrap();
    writeln!(s, "const int LENGTH = {};", c.length).unwrap();
    writeln!(s, "const double P = {};", real_literal(c.p)).unwrap();
    if c.version != LightVersion::A {
        writeln!(s, "const double Q = {};", real_literal(c.q)).unwrap();
    }
    writeln!(s, "const int[][] MOVES = {};", table(&c.moves)).unwrap();
    writeln!(s, "const int[][] REW = {};", table(&c.rewards)).unwrap();
    s.push('\n');
    s.push_str("player1 [r_l, r_r, r_f, done];\nplayer2 [l_y, l_g];\n\n");
    s.push_str("module roborta_vs_the_light\n");
    s.push_str("  col : [0..WIDTH-1] init 0;\n");
    s.push_str("  row : [0..LENGTH] init 0;\n");
    s.push_str("  light : [0..3] init 0;\n\n");
    s.push_str("  // light moves\n");
    for (label, color, q) in [("l_y", 1, q_yellow), ("l_g", 2, q_green)] {
        if q {
            writeln!(s, "  [{label}] (light=0) & (row<LENGTH) -> (1-Q) : (light'={color}) + Q : (light'=3);").unwrap();
        } else {
            writeln!(s, "  [{label}] (light=0) & (row<LENGTH) -> (light'={color});").unwrap();
        }
    }
    s.push_str("\n  // Roborta moves\n");
    s.push_str(
        "  [r_l] ((light=1) | (light=3)) & (MOVES[col][row] <= 1)\n    \
         -> (1-P) : (light'=0) & (col'=(col-1)%WIDTH) + P : (light'=0);\n",
    );
    s.push_str(
        "  [r_r] ((light=1) | (light=3)) & (MOVES[col][row] >= 1)\n    \
         -> (1-P) : (light'=0) & (col'=(col+1)%WIDTH) + P : (light'=0);\n",
    );
    s.push_str(
        "  [r_f] ((light=2) | (light=3)) & (row<LENGTH)\n    \
         -> (1-P) : (light'=0) & (row'=row+1) + P : (light'=0);\n",
    );
    s.push_str("  [done] (row=LENGTH) -> true;\n");
    s.push_str("endmodule\n\n");
    s.push_str("rewards\n  (light=0) & (row<LENGTH) : REW[col][row];\nendrewards\n");
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::PlayerClass;
    use crate::modelc::{compile_str, CompileOptions};

    fn compiled(c: &RobortaConfig) -> crate::modelc::CompiledGame {
        compile_str(&gen_roborta(c).unwrap(), &CompileOptions::default()).unwrap()
    }

    #[test]
    fn four_by_four_census() {
        for seed in 0..5 {
            let c = compiled(&RobortaConfig::random(4, 4, 0.1, 0.0, LightVersion::A, seed));
            let players = c.game.vertices().filter(|&v| c.game.class(v) != PlayerClass::Prob).count();
            assert!(players <= 4 * 5 * 4, "{players}");
            for v in c.game.vertices() {
                match (c.var(v, "light"), c.var(v, "row")) {
                    (Some(0), Some(r)) if r < 4 => assert_eq!(c.game.class(v), PlayerClass::Min),
                    (Some(0), _) => assert!(c.game.is_terminal(v)),
                    (Some(_), _) => assert_eq!(c.game.class(v), PlayerClass::Max),
                    (None, _) => assert_eq!(c.game.class(v), PlayerClass::Prob),
                }
            }
        }
    }

    fn value(c: &RobortaConfig) -> f64 {
        let g = compiled(c).game;
        crate::solver::solve(&g, &Default::default()).unwrap().values.as_slice()[0]
    }

    #[test]
    fn version_a_values() {
        // All-green is one light strategy: Roborta walks column 0 and
        // collects each cell an expected 1/(1-P) times.
        let cfg = RobortaConfig::random(5, 4, 0.25, 0.0, LightVersion::A, 3);
        let all_green = cfg.rewards[0].iter().sum::<u32>() as f64 / 0.75;
        assert!(value(&cfg) <= all_green * (1.0 + 1e-6));
        assert!(value(&RobortaConfig { p: 0.5, ..cfg.clone() }) >= value(&cfg));

        // On a single column yellow only adds collections, so green is optimal.
        let narrow = RobortaConfig::random(1, 6, 0.25, 0.0, LightVersion::A, 9);
        let exact = narrow.rewards[0].iter().sum::<u32>() as f64 / 0.75;
        assert!((value(&narrow) - exact).abs() <= 1e-5 * exact.max(1.0));

        let zero = RobortaConfig {
            p: 0.0,
            rewards: vec![vec![0; 4]; 5],
            ..cfg
        };
        assert_eq!(value(&zero), 0.0);
    }

    #[test]
    fn light_failure_adds_vertices() {
        let a = compiled(&RobortaConfig::random(4, 4, 0.1, 0.2, LightVersion::A, 1)).game.num_vertices();
        let b = compiled(&RobortaConfig::random(4, 4, 0.1, 0.2, LightVersion::B, 1)).game.num_vertices();
        let c = compiled(&RobortaConfig::random(4, 4, 0.1, 0.2, LightVersion::C, 1)).game.num_vertices();
        assert!(a < b && b < c, "{a} {b} {c}");
    }

    #[test]
    fn deterministic_text() {
        let c = RobortaConfig::random(6, 3, 0.1, 0.3, LightVersion::C, 42);
        assert_eq!(gen_roborta(&c).unwrap(), gen_roborta(&c.clone()).unwrap());
        assert_eq!(c, RobortaConfig::random(6, 3, 0.1, 0.3, LightVersion::C, 42));
        assert_ne!(c.rewards, RobortaConfig::random(6, 3, 0.1, 0.3, LightVersion::C, 43).rewards);
    }

    #[test]
    fn invalid_configs() {
        let ok = RobortaConfig::random(3, 3, 0.1, 0.1, LightVersion::B, 0);
        for broken in [
            RobortaConfig { p: 1.0, ..ok.clone() },
            RobortaConfig { q: -0.1, ..ok.clone() },
            RobortaConfig { width: 0, ..ok.clone() },
            RobortaConfig { moves: vec![vec![3; 3]; 3], ..ok.clone() },
            RobortaConfig { rewards: vec![vec![1; 2]; 3], ..ok.clone() },
        ] {
            assert!(gen_roborta(&broken).is_err(), "{broken:?}");
        }
        // Q is irrelevant to version A.
        assert!(gen_roborta(&RobortaConfig { q: 7.0, version: LightVersion::A, ..ok }).is_ok());
    }
}
