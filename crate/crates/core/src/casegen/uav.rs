//! A UAV surveying a road network with a human operator.
//!
//! At each waypoint the operator (player 2) either captures imagery or
//! loiters; loitering forever is the unfair behaviour. The first
//! capture at a waypoint pays its reward. The UAV (player 1) then picks
//! the next road, except at checkpoints, where the piloting stays with
//! the operator unless it is delegated to the UAV (probability `D`).
//! Every flight stops the UAV with probability `S`, or with certainty on
//! a dangerous road. Once every waypoint is captured the UAV may end the
//! mission. Stopping and mission end share one terminal state.

use std::collections::BTreeSet;
use std::fmt::Write;

use rand::Rng;

use super::{real_literal, seeded_rng, CasegenError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Road {
    pub a: usize,
    pub b: usize,
    pub dangerous: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct UavConfig {
    pub waypoints: usize,
    /// Probability that the operator hands piloting to the UAV at a checkpoint.
    pub d: f64,
    /// Probability that a flight on a safe road stops the UAV.
    pub s: f64,
    pub seed: u64,
    /// Undirected roads.
    pub roads: Vec<Road>,
    pub checkpoints: BTreeSet<usize>,
    /// Capture reward per waypoint.
    pub rewards: Vec<u32>,
}

pub const MAX_WAYPOINT_REWARD: u32 = 10;

impl UavConfig {
    /// A random safe spanning tree plus extra roads that are dangerous
    /// with probability 0.3. Waypoints other than 0 are checkpoints with
    /// probability 1/3. Rewards are uniform in 1..=10.
    pub fn random(waypoints: usize, d: f64, s: f64, seed: u64) -> Self {
        let mut rng = seeded_rng(seed);
        let mut roads = Vec::new();
        for b in 1..waypoints {
            let a = rng.random_range(0..b);
            roads.push(Road { a, b, dangerous: false });
        }
        for b in 1..waypoints {
            for a in 0..b {
                let taken = roads.iter().any(|r| r.a == a && r.b == b);
                if !taken && rng.random_bool(0.25) {
                    let dangerous = rng.random_bool(0.3);
                    roads.push(Road { a, b, dangerous });
                }
            }
        }
        roads.sort();
        let checkpoints = (1..waypoints).filter(|_| rng.random_bool(1.0 / 3.0)).collect();
        let rewards = (0..waypoints).map(|_| rng.random_range(1..=MAX_WAYPOINT_REWARD)).collect();
        UavConfig {
            waypoints,
            d,
            s,
            seed,
            roads,
            checkpoints,
            rewards,
        }
    }

    /// Six waypoints on a ring w0..w5 with the chord w1-w4, a dangerous
    /// diagonal w0-w3, and checkpoints w2 and w5.
    pub fn six_waypoint_network(d: f64, s: f64, rewards: [u32; 6]) -> Self {
        let safe = |a, b| Road { a, b, dangerous: false };
        UavConfig {
            waypoints: 6,
            d,
            s,
            seed: 0,
            roads: vec![
                safe(0, 1),
                Road { a: 0, b: 3, dangerous: true },
                safe(0, 5),
                safe(1, 2),
                safe(1, 4),
                safe(2, 3),
                safe(3, 4),
                safe(4, 5),
            ],
            checkpoints: [2, 5].into(),
            rewards: rewards.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<(), CasegenError> {
        let bad = |msg: String| Err(CasegenError::Invalid(msg));
        let n = self.waypoints;
        if n < 2 {
            return bad(format!("{n} waypoints; at least 2 are needed"));
        }
        if !(0.0..=1.0).contains(&self.d) {
            return bad(format!("delegation probability {} is outside [0, 1]", self.d));
        }
        if !(self.s > 0.0 && self.s <= 1.0) {
            return bad(format!("stop probability {} is outside (0, 1]", self.s));
        }
        if self.rewards.len() != n {
            return bad(format!("{} rewards for {n} waypoints", self.rewards.len()));
        }
        if let Some(c) = self.checkpoints.iter().find(|&&c| c >= n) {
            return bad(format!("checkpoint {c} is not a waypoint"));
        }
        let mut seen = BTreeSet::new();
        for r in &self.roads {
            if r.a >= n || r.b >= n || r.a == r.b {
                return bad(format!("road {}-{} is malformed", r.a, r.b));
            }
            if !seen.insert((r.a.min(r.b), r.a.max(r.b))) {
                return bad(format!("road {}-{} is listed twice", r.a, r.b));
            }
        }
        let mut reached = vec![false; n];
        let mut stack = vec![0];
        reached[0] = true;
        while let Some(x) = stack.pop() {
            for r in &self.roads {
                for (from, to) in [(r.a, r.b), (r.b, r.a)] {
                    if from == x && !reached[to] {
                        reached[to] = true;
                        stack.push(to);
                    }
                }
            }
        }
        if let Some(w) = reached.iter().position(|&r| !r) {
            return bad(format!("waypoint {w} is not connected to waypoint 0"));
        }
        Ok(())
    }

    /// Directed flights, ordered by source then target.
    fn flights(&self) -> Vec<(usize, usize, bool)> {
        let mut f: Vec<_> = self
            .roads
            .iter()
            .flat_map(|r| [(r.a, r.b, r.dangerous), (r.b, r.a, r.dangerous)])
            .collect();
        f.sort();
        f
    }
}

pub fn gen_uav(c: &UavConfig) -> Result<String, CasegenError> {
    c.validate()?;
    let n = c.waypoints;
    let flights = c.flights();
    let mut stop = String::from("(done'=1) & (pos'=0) & (phase'=0) & (newcap'=0)");
    for i in 0..n {
        write!(stop, " & (v{i}'=0)").unwrap();
    }
    let labels = |prefix: &str| -> Vec<String> { flights.iter().map(|(a, b, _)| format!("{prefix}_{a}_{b}")).collect() };
    let caps: Vec<String> = (0..n).map(|i| format!("cap_{i}")).collect();

    let mut s = String::new();
    writeln!(s, "// UAV vs. operator, {n} waypoints, seed {}", c.seed).unwrap();
    writeln!(s, "const double D = {};", real_literal(c.d)).unwrap();
    writeln!(s, "const double S = {};", real_literal(c.s)).unwrap();
    s.push('\n');
    writeln!(s, "player1 [{}, finish, end];", labels("fly").join(", ")).unwrap();
    writeln!(s, "player2 [loiter, {}, {}];", caps.join(", "), labels("op").join(", ")).unwrap();
    s.push_str("\nmodule uav\n");
    writeln!(s, "  pos : [0..{}] init 0;", n - 1).unwrap();
    s.push_str("  // 0: operator at a waypoint, 1: UAV pilots, 2: operator pilots\n");
    s.push_str("  phase : [0..2] init 0;\n");
    s.push_str("  newcap : [0..1] init 0;\n");
    s.push_str("  done : [0..1] init 0;\n");
    for i in 0..n {
        writeln!(s, "  v{i} : [0..1] init 0;").unwrap();
    }
    s.push('\n');
    s.push_str("  [loiter] (done=0) & (phase=0) -> true;\n");
    for i in 0..n {
        let captured = format!("(newcap'=1-v{i}) & (v{i}'=1)");
        if c.checkpoints.contains(&i) {
            writeln!(
                s,
                "  [cap_{i}] (done=0) & (phase=0) & (pos={i})\n    -> D : {captured} & (phase'=1) + (1-D) : {captured} & (phase'=2);"
            )
            .unwrap();
        } else {
            writeln!(s, "  [cap_{i}] (done=0) & (phase=0) & (pos={i}) -> {captured} & (phase'=1);").unwrap();
        }
    }
    for (prefix, phase) in [("fly", 1), ("op", 2)] {
        s.push('\n');
        for &(a, b, dangerous) in &flights {
            let guard = format!("(done=0) & (phase={phase}) & (pos={a})");
            if dangerous {
                writeln!(s, "  [{prefix}_{a}_{b}] {guard} -> {stop};").unwrap();
            } else {
                writeln!(
                    s,
                    "  [{prefix}_{a}_{b}] {guard}\n    -> (1-S) : (pos'={b}) & (phase'=0) & (newcap'=0) + S : {stop};"
                )
                .unwrap();
            }
        }
    }
    let all: Vec<String> = (0..n).map(|i| format!("(v{i}=1)")).collect();
    writeln!(s, "\n  [finish] (done=0) & (phase=1) & {} -> {stop};", all.join(" & ")).unwrap();
    s.push_str("  [end] (done=1) -> true;\nendmodule\n\nrewards\n");
    for (i, r) in c.rewards.iter().enumerate() {
        writeln!(s, "  (newcap=1) & (pos={i}) : {r};").unwrap();
    }
    s.push_str("endrewards\n");
    Ok(s)
}
