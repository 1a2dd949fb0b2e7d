//! Property checks shared by the invariant suite and the acceptance
//! harness. Each takes a runner so callers pick the seed and case count.

#![allow(dead_code)]

use fairgame::casegen::{gen_roborta, gen_uav, LightVersion, RobortaConfig, UavConfig};
use fairgame::corpus::{filtered_corpus, random_game, CorpusParams};
use fairgame::fairness::{exists_pre_f, forall_pre_f};
use fairgame::modelc::{compile_str, CompileOptions};
use fairgame::oracle::oracle_value;
use fairgame::sim::estimate_value;
use fairgame::solver::{gamma_apply, upper_bound_vector};
use fairgame::{is_stopping_under_fairness, solve, GameGraph, ValueVector, VertexId, VertexSet};
use proptest::collection::vec;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

pub fn runner(seed: u8, cases: u32) -> TestRunner {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    TestRunner::new_with_rng(config, TestRng::from_seed(RngAlgorithm::ChaCha, &[seed; 32]))
}

/// The first game at or after `seed` that stops under fairness.
pub fn stopping_game(seed: u64, p: &CorpusParams) -> GameGraph {
    filtered_corpus(seed, 1, p, |g| is_stopping_under_fairness(g).stopping)
        .pop()
        .expect("corpus is unbounded")
        .1
}

fn seeds() -> impl Strategy<Value = u64> {
    0u64..1_000_000_000
}

fn report<T: std::fmt::Debug>(r: Result<(), proptest::test_runner::TestError<T>>) -> Result<(), String> {
    r.map_err(|e| e.to_string())
}

pub fn gamma_monotone(r: &mut TestRunner) -> Result<(), String> {
    let p = CorpusParams::up_to(40);
    report(r.run(
        &(seeds(), vec(0.0f64..20.0, 40), vec(0.0f64..5.0, 40)),
        |(seed, f, bump)| {
            let g = random_game(seed, &p);
            let n = g.num_vertices();
            let f = ValueVector::new(f[..n].to_vec());
            let h = ValueVector::new(f.iter().zip(&bump).map(|(a, b)| a + b).collect());
            prop_assert!(gamma_apply(&g, &f).le(&gamma_apply(&g, &h)));
            Ok(())
        },
    ))
}

/// Clamped iterates never increase and never drop below the oracle value.
pub fn clamped_descent(r: &mut TestRunner) -> Result<(), String> {
    let p = CorpusParams::small();
    report(r.run(&seeds(), |seed| {
        let g = stopping_game(seed, &p);
        let exact = oracle_value(&g).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let mut f = upper_bound_vector(&g, 0.0).map_err(|e| TestCaseError::fail(e.to_string()))?;
        for k in 0..300 {
            let step = gamma_apply(&g, &f);
            let next = ValueVector::new(f.iter().zip(step.iter()).map(|(a, b)| a.min(*b)).collect());
            prop_assert!(next.le(&f), "iterate {} increased", k + 1);
            for (v, (x, o)) in f.iter().zip(exact.iter()).enumerate() {
                prop_assert!(*x >= o - 1e-6, "iterate {k} at v{v}: {x} < oracle {o}");
            }
            f = next;
        }
        Ok(())
    }))
}

fn subset(n: usize, mask: u64) -> VertexSet {
    VertexSet::from_ids(n, (0..n).filter(|i| mask >> i & 1 == 1).map(VertexId))
}

pub fn pre_monotone(r: &mut TestRunner) -> Result<(), String> {
    let p = CorpusParams::up_to(40);
    report(r.run(&(seeds(), any::<u64>(), any::<u64>()), |(seed, a, b)| {
        let g = random_game(seed, &p);
        let n = g.num_vertices();
        let small = subset(n, a);
        let large = subset(n, a | b);
        prop_assert!(forall_pre_f(&g, &small).is_subset(&forall_pre_f(&g, &large)));
        prop_assert!(exists_pre_f(&g, &small).is_subset(&exists_pre_f(&g, &large)));
        Ok(())
    }))
}

fn roborta_configs() -> impl Strategy<Value = RobortaConfig> {
    (1usize..=5, 1usize..=4, 0.0f64..0.9, 0.0f64..0.9, 0usize..3, any::<u64>()).prop_map(
        |(w, l, p, q, version, seed)| {
            let version = [LightVersion::A, LightVersion::B, LightVersion::C][version];
            RobortaConfig::random(w, l, p, q, version, seed)
        },
    )
}

fn uav_configs() -> impl Strategy<Value = UavConfig> {
    (2usize..=5, 0.0f64..=1.0, 0.01f64..=1.0, any::<u64>())
        .prop_map(|(n, d, s, seed)| UavConfig::random(n, d, s, seed))
}

/// Same text, same bytes; the output validates and survives a JSON round trip.
pub fn compile_determinism(r: &mut TestRunner) -> Result<(), String> {
    let opts = CompileOptions::default();
    let models = prop_oneof![
        roborta_configs().prop_map(|c| gen_roborta(&c).unwrap()),
        uav_configs().prop_map(|c| gen_uav(&c).unwrap()),
    ];
    report(r.run(&models, |text| {
        let a = compile_str(&text, &opts).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let b = compile_str(&text, &opts).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(a.to_json(), b.to_json());
        prop_assert!(a.game.validate().is_empty());
        let back = fairgame::game::game_from_json(&fairgame::game::game_to_json(&a.game)).unwrap();
        prop_assert_eq!(back, a.game);
        Ok(())
    }))
}

/// Same seed and strategies give the same estimate on any pool size.
pub fn sim_reproducible(r: &mut TestRunner) -> Result<(), String> {
    let p = CorpusParams::up_to(20);
    let pools: Vec<rayon::ThreadPool> = [1, 3]
        .iter()
        .map(|&t| rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap())
        .collect();
    report(r.run(&(seeds(), any::<u64>(), 1u64..300), |(seed, sim_seed, episodes)| {
        let g = stopping_game(seed, &p);
        let s = solve(&g, &Default::default()).map_err(|e| TestCaseError::fail(e.to_string()))?;
        let runs: Vec<_> = pools
            .iter()
            .map(|pool| pool.install(|| estimate_value(&g, &s.sigma1, &s.sigma2, episodes, sim_seed).unwrap()))
            .collect();
        prop_assert_eq!(runs[0].to_json(), runs[1].to_json());
        prop_assert_eq!(runs[0], estimate_value(&g, &s.sigma1, &s.sigma2, episodes, sim_seed).unwrap());
        Ok(())
    }))
}
