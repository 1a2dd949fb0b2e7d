//! `fairgame`: batch driver for checking, solving, simulating and
//! generating fair stochastic games.
//!
//! Exit codes: 0 success, 1 parse or validation error, 2 not stopping
//! under fairness, 3 value iteration did not converge, 4 size guard.

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fairgame::casegen::{gen_roborta, gen_uav, LightVersion, RobortaConfig, UavConfig};
use fairgame::fairness::FairnessJson;
use fairgame::game::game_from_json;
use fairgame::jsonfmt::{to_pretty, OrderedMap};
use fairgame::modelc::{compile_str, CompileOptions, ModelError};
use fairgame::oracle::{oracle_solve, OracleError};
use fairgame::sim::{estimate_value_capped, DEFAULT_STEP_CAP};
use fairgame::{solve, DetMemorylessStrategy, GameGraph, PlayerClass, SolveError, SolveOptions, VertexId};
use serde::Serialize;
use serde_json::Value;

#[derive(Parser)]
#[command(name = "fairgame", version, about = "Total-reward stochastic games with a fair minimizer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide stopping under fairness.
    Check(InputArgs),
    /// Compute values and optimal strategies.
    Solve(SolveArgs),
    /// Estimate the value of a strategy pair by Monte Carlo.
    Simulate(SimulateArgs),
    /// Brute-force values over deterministic memoryless strategies.
    Oracle(InputArgs),
    /// Emit a generated case-study model.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Print vertex and edge counts.
    Inspect(InputArgs),
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Model (.fgg) or game JSON; `-` reads stdin.
    model: String,
    /// Turn deadlocked states into terminals.
    #[arg(long)]
    close_deadlocks: bool,
    #[arg(long, default_value_t = 10_000_000)]
    max_vertices: usize,
    #[arg(long, default_value_t = fairgame::game::ROW_SUM_TOLERANCE)]
    row_tolerance: f64,
    /// Write the result here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Machine-readable output where a text form is the default.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long, default_value_t = 1e-6, value_parser = positive)]
    epsilon: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_iters: usize,
    /// Scale the initial upper bound by `1 + margin`.
    #[arg(long, default_value_t = 0.0)]
    margin: f64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    solver: SolverArgs,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Take sigma1 and sigma2 from a previous `solve` output.
    #[arg(long)]
    strategies: Option<PathBuf>,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    episodes: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_STEP_CAP)]
    step_cap: u64,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Robot on a grid against a traffic light.
    Roborta(RobortaArgs),
    /// UAV surveying a road network with an operator.
    Uav(UavArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Version {
    A,
    B,
    C,
}

#[derive(Args)]
struct GenOutput {
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Emit the compiled game JSON instead of the model text.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RobortaArgs {
    #[arg(long, default_value_t = 4)]
    width: usize,
    #[arg(long, default_value_t = 4)]
    length: usize,
    #[arg(long, value_enum, ignore_case = true, default_value = "a")]
    version: Version,
    /// Robot failure probability.
    #[arg(long, default_value_t = 0.1)]
    p: f64,
    /// Light failure probability (versions B and C).
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: GenOutput,
}

#[derive(Clone, Copy, ValueEnum)]
enum Layout {
    Random,
    Six,
}

#[derive(Args)]
struct UavArgs {
    #[arg(long, default_value_t = 6)]
    waypoints: usize,
    /// Delegation probability at checkpoints.
    #[arg(long, default_value_t = 0.1)]
    d: f64,
    /// Stop probability on safe roads.
    #[arg(long, default_value_t = 0.05)]
    s: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// `six` is the fixed six-waypoint network; rewards still come from the seed.
    #[arg(long, value_enum, default_value = "random")]
    layout: Layout,
    #[command(flatten)]
    out: GenOutput,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

struct Failure {
    code: u8,
    message: String,
    /// Written to the output before exiting.
    payload: Option<String>,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
            payload: None,
        }
    }
}

fn read_source(path: &str) -> Result<String, Failure> {
    let mut text = String::new();
    let r = if path == "-" {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        fs::read_to_string(path).map(|t| text = t)
    };
    r.map_err(|e| Failure::new(1, format!("{path}: {e}")))?;
    Ok(text)
}

fn load(a: &InputArgs) -> Result<GameGraph, Failure> {
    let text = read_source(&a.model)?;
    let game = if text.trim_start().starts_with('{') {
        game_from_json(&text).map_err(|e| Failure::new(1, format!("{}: {e}", a.model)))?
    } else {
        let opts = CompileOptions {
            close_deadlocks: a.close_deadlocks,
            max_vertices: a.max_vertices,
            row_tolerance: a.row_tolerance,
        };
        match compile_str(&text, &opts) {
            Ok(c) => c.game,
            Err(e @ ModelError::TooLarge { .. }) => return Err(Failure::new(4, format!("{}: {e}", a.model))),
            Err(e) => return Err(Failure::new(1, format!("{}: {e}", a.model))),
        }
    };
    let violations = game.validate();
    if let Some(v) = violations.first() {
        return Err(Failure::new(1, format!("{}: {v}", a.model)));
    }
    Ok(game)
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| Failure::new(1, format!("{}: {e}", p.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::new(1, e.to_string())),
    }
}

fn solve_options(s: &SolverArgs) -> SolveOptions {
    SolveOptions {
        epsilon: s.epsilon,
        max_iter: s.max_iters,
        margin: s.margin,
        threads: s.threads.max(1),
        ..SolveOptions::default()
    }
}

fn solve_failure(e: SolveError) -> Failure {
    match e {
        SolveError::NotStopping { .. } => Failure::new(2, e.to_string()),
        SolveError::NonConvergence { ref partial } => Failure {
            payload: Some(partial.to_json()),
            ..Failure::new(3, e.to_string())
        },
        SolveError::Invalid(_) => Failure::new(1, e.to_string()),
        other => Failure::new(1, other.to_string()),
    }
}

fn not_stopping(game: &GameGraph) -> Option<Failure> {
    let report = FairnessJson::from_game(game);
    (!report.stopping_under_fairness).then(|| Failure {
        payload: Some(to_pretty(&report)),
        ..Failure::new(2, format!("game is not stopping under fairness; witness {:?}", report.witness))
    })
}

fn run_solve(a: &SolveArgs) -> Result<(), Failure> {
    let game = load(&a.input)?;
    if let Some(f) = not_stopping(&game) {
        return Err(f);
    }
    let s = solve(&game, &solve_options(&a.solver)).map_err(solve_failure)?;
    emit(&a.input.output, &s.to_json())
}

fn strategy_from(v: &Value, key: &str, owner: PlayerClass) -> Result<DetMemorylessStrategy, Failure> {
    let bad = || Failure::new(1, format!("strategy file: `{key}` is not an id map"));
    let map = v.get(key).and_then(Value::as_object).ok_or_else(bad)?;
    let mut pairs = Vec::with_capacity(map.len());
    for (k, w) in map {
        let from: usize = k.parse().map_err(|_| bad())?;
        let to = w.as_u64().ok_or_else(bad)? as usize;
        pairs.push((VertexId(from), VertexId(to)));
    }
    Ok(DetMemorylessStrategy::from_pairs(owner, pairs))
}

fn run_simulate(a: &SimulateArgs) -> Result<(), Failure> {
    let game = load(&a.input)?;
    let (sigma1, sigma2) = match &a.strategies {
        Some(path) => {
            let text = read_source(&path.to_string_lossy())?;
            let v: Value = serde_json::from_str(&text).map_err(|e| Failure::new(1, format!("strategy file: {e}")))?;
            (
                strategy_from(&v, "sigma1", PlayerClass::Max)?,
                strategy_from(&v, "sigma2", PlayerClass::Min)?,
            )
        }
        None => {
            if let Some(f) = not_stopping(&game) {
                return Err(f);
            }
            let s = solve(&game, &solve_options(&a.solver)).map_err(solve_failure)?;
            (s.sigma1, s.sigma2)
        }
    };
    let threads = a.solver.threads.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::new(1, e.to_string()))?;
    let est = pool
        .install(|| estimate_value_capped(&game, &sigma1, &sigma2, a.episodes, a.seed, a.step_cap))
        .map_err(|e| Failure::new(1, format!("strategies do not fit the game: {e}")))?;
    emit(&a.input.output, &est.to_json())
}

#[derive(Serialize)]
struct OracleJson {
    values: OrderedMap<Vec<(usize, fairgame::jsonfmt::F17)>>,
    sigma1: OrderedMap<Vec<(usize, usize)>>,
    sigma2: OrderedMap<Vec<(usize, usize)>>,
    pairs: usize,
}

fn run_oracle(a: &InputArgs) -> Result<(), Failure> {
    let game = load(a)?;
    let out = oracle_solve(&game).map_err(|e| match e {
        OracleError::TooManyVertices { .. } | OracleError::TooManyPairs(_) => Failure::new(4, e.to_string()),
        OracleError::NoFairStrategy | OracleError::FairPairTrapped(_) => {
            not_stopping(&game).unwrap_or_else(|| Failure::new(2, e.to_string()))
        }
        other => Failure::new(1, other.to_string()),
    })?;
    let json = OracleJson {
        values: OrderedMap(out.values.iter().enumerate().map(|(i, &x)| (i, fairgame::jsonfmt::F17(x))).collect()),
        sigma1: OrderedMap(out.sigma1.iter().map(|(v, w)| (v.0, w.0)).collect()),
        sigma2: OrderedMap(out.sigma2.iter().map(|(v, w)| (v.0, w.0)).collect()),
        pairs: out.pairs,
    };
    emit(&a.output, &to_pretty(&json))
}

#[derive(Serialize)]
struct Stats {
    vertices: usize,
    edges: usize,
    initial: usize,
    max: usize,
    min: usize,
    prob: usize,
    terminals: Vec<usize>,
}

fn run_inspect(a: &InputArgs) -> Result<(), Failure> {
    let g = load(a)?;
    let terminals: Vec<usize> = g.terminals().iter().map(|v| v.0).collect();
    let count = |c: PlayerClass| g.vertices().filter(|&v| g.class(v) == c && !g.is_terminal(v)).count();
    let stats = Stats {
        vertices: g.num_vertices(),
        edges: g.num_edges(),
        initial: g.initial().0,
        max: count(PlayerClass::Max),
        min: count(PlayerClass::Min),
        prob: count(PlayerClass::Prob),
        terminals,
    };
    let text = if a.json {
        to_pretty(&stats)
    } else {
        format!(
            "vertices  {}\nedges     {}\ninitial   {}\nmax       {}\nmin       {}\nprob      {}\nterminals {}\n",
            stats.vertices,
            stats.edges,
            stats.initial,
            stats.max,
            stats.min,
            stats.prob,
            stats.terminals.len()
        )
    };
    emit(&a.output, &text)
}

fn run_check(a: &InputArgs) -> Result<(), Failure> {
    let game = load(a)?;
    emit(&a.output, &to_pretty(&FairnessJson::from_game(&game)))
}

fn emit_model(out: &GenOutput, text: String) -> Result<(), Failure> {
    if out.json {
        let c = compile_str(&text, &CompileOptions::default()).map_err(|e| Failure::new(1, e.to_string()))?;
        let mut j = c.to_json();
        j.push('\n');
        emit(&out.output, &j)
    } else {
        emit(&out.output, &text)
    }
}

fn run_gen(g: &GenCommand) -> Result<(), Failure> {
    let invalid = |e: fairgame::casegen::CasegenError| Failure::new(1, e.to_string());
    match g {
        GenCommand::Roborta(a) => {
            let version = match a.version {
                Version::A => LightVersion::A,
                Version::B => LightVersion::B,
                Version::C => LightVersion::C,
            };
            let cfg = RobortaConfig::random(a.width, a.length, a.p, a.q, version, a.seed);
            emit_model(&a.out, gen_roborta(&cfg).map_err(invalid)?)
        }
        GenCommand::Uav(a) => {
            let cfg = match a.layout {
                Layout::Random => UavConfig::random(a.waypoints, a.d, a.s, a.seed),
                Layout::Six => {
                    let rewards = UavConfig::random(6, a.d, a.s, a.seed).rewards;
                    let mut fixed = [0; 6];
                    fixed.copy_from_slice(&rewards);
                    UavConfig {
                        seed: a.seed,
                        ..UavConfig::six_waypoint_network(a.d, a.s, fixed)
                    }
                }
            };
            emit_model(&a.out, gen_uav(&cfg).map_err(invalid)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // Exit 2 is reserved for non-stopping games.
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let r = match &cli.command {
        Command::Check(a) => run_check(a),
        Command::Solve(a) => run_solve(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Oracle(a) => run_oracle(a),
        Command::Gen(g) => run_gen(g),
        Command::Inspect(a) => run_inspect(a),
    };
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if let Some(p) = &f.payload {
                let _ = io::stdout().write_all(p.as_bytes());
            }
            eprintln!("fairgame: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fairgame::game::game_to_json;

    #[test]
    fn epsilon_must_be_positive() {
        assert!(positive("1e-6").is_ok());
        assert!(positive("0").is_err());
        assert!(positive("-1").is_err());
        assert!(positive("nan").is_err());
    }

    #[test]
    fn strategy_maps_parse() {
        let v: Value = serde_json::from_str(r#"{"sigma1": {"0": 1}, "sigma2": {}}"#).unwrap();
        let s = strategy_from(&v, "sigma1", PlayerClass::Max).ok().unwrap();
        assert_eq!(s.get(VertexId(0)), Some(VertexId(1)));
        assert!(strategy_from(&v, "missing", PlayerClass::Min).is_err());
    }

    #[test]
    fn game_json_is_accepted() {
        let g = GameGraph::new(vec![PlayerClass::Prob], vec![vec![(VertexId(0), 1.0)]], vec![0.0], VertexId(0)).unwrap();
        assert!(game_from_json(&game_to_json(&g)).is_ok());
    }
}
