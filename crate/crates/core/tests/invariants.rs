mod shared;

use fairgame::corpus::{random_game, CorpusParams};
use fairgame::game::{game_from_json, game_to_json};
use fairgame::oracle::StrategySpace;
use fairgame::sim::estimate_value;
use fairgame::solver::{gamma_apply, linear_solve_mc_expected_reward};
use fairgame::{solve, PlayerClass, RandMemorylessStrategy};
use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use shared::{runner, stopping_game};

#[test]
fn gamma_is_monotone() {
    shared::gamma_monotone(&mut runner(1, 256)).unwrap();
}

#[test]
fn clamped_iteration_descends_above_the_value() {
    shared::clamped_descent(&mut runner(2, 64)).unwrap();
}

#[test]
fn pre_operators_are_monotone() {
    shared::pre_monotone(&mut runner(3, 256)).unwrap();
}

#[test]
fn compilation_is_deterministic() {
    shared::compile_determinism(&mut runner(4, 48)).unwrap();
}

#[test]
fn simulation_is_reproducible() {
    shared::sim_reproducible(&mut runner(5, 32)).unwrap();
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 128,
        failure_persistence: None,
        rng_seed: RngSeed::Fixed(6),
        ..ProptestConfig::default()
    })]

    #[test]
    fn json_round_trip_keeps_ids(seed in 0u64..1_000_000) {
        let g = random_game(seed, &CorpusParams::up_to(30));
        let text = game_to_json(&g);
        let back = game_from_json(&text).unwrap();
        prop_assert_eq!(game_to_json(&back), text);
        prop_assert_eq!(back, g);
    }

    #[test]
    fn fixing_min_then_max_matches_fixing_both(seed in 0u64..1_000_000) {
        let g = random_game(seed, &CorpusParams::up_to(30));
        let min = RandMemorylessStrategy::uniform(&g, PlayerClass::Min);
        let max = RandMemorylessStrategy::uniform(&g, PlayerClass::Max);
        let direct = g.induce_chain(&max, &min).unwrap();
        let mdp = g.induce_mdp(&min).unwrap();
        let staged = mdp.graph().induce_chain(&max, &RandMemorylessStrategy::uniform(mdp.graph(), PlayerClass::Min)).unwrap();
        prop_assert_eq!(direct, staged);
    }

    #[test]
    fn solution_is_a_fixed_point(seed in 0u64..1_000_000) {
        let g = stopping_game(seed, &CorpusParams::up_to(30));
        let opts = fairgame::SolveOptions::default();
        let s = solve(&g, &opts).unwrap();
        let step = gamma_apply(&g, &s.values);
        for (x, y) in s.values.iter().zip(step.iter()) {
            prop_assert!((x - y).abs() <= 10.0 * opts.epsilon * x.abs().max(1.0));
        }
        prop_assert!(s.upper_bound.iter().zip(s.values.iter()).all(|(u, x)| u >= x));
        let chain = g.induce_chain(&s.sigma1, &s.sigma2).unwrap();
        let exact = linear_solve_mc_expected_reward(&chain).unwrap();
        for (x, y) in s.values.iter().zip(exact.iter()) {
            prop_assert!((x - y).abs() <= 1e-4 * y.abs().max(1.0));
        }
    }

    #[test]
    fn chains_solve_to_their_linear_value(seed in 0u64..1_000_000) {
        // Fixing uniform strategies in a stopping game leaves an absorbing chain.
        let g = stopping_game(seed, &CorpusParams::up_to(30));
        let min = RandMemorylessStrategy::uniform(&g, PlayerClass::Min);
        let mdp = g.induce_mdp(&min).unwrap();
        let max = RandMemorylessStrategy::uniform(mdp.graph(), PlayerClass::Max);
        let chain_game = mdp.graph().induce_mdp(&max).unwrap().into_graph();
        prop_assert!(chain_game.vertices().all(|v| chain_game.class(v) == PlayerClass::Prob));
        let exact = linear_solve_mc_expected_reward(&chain_game.as_chain()).unwrap();
        let s = solve(&chain_game, &Default::default()).unwrap();
        for (x, y) in s.values.iter().zip(exact.iter()) {
            prop_assert!((x - y).abs() <= 1e-6 * y.abs().max(1.0), "{} vs {}", x, y);
        }
    }
}

/// Against every deterministic Max strategy, the synthesized Min strategy
/// terminates every episode.
#[test]
fn synthesized_min_strategy_terminates_against_any_max() {
    for seed in 0..40 {
        let g = stopping_game(seed * 7919, &CorpusParams::small());
        let s = solve(&g, &Default::default()).unwrap();
        let space = StrategySpace::new(&g, PlayerClass::Max).unwrap();
        for sigma1 in space.iter() {
            let est = estimate_value(&g, &sigma1, &s.sigma2, 200, seed).unwrap();
            assert_eq!(est.termination_rate, 1.0, "seed {seed}");
        }
    }
}
