mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rifflescrambler::analysis::{check_legality, pebble_metrics, simulate_pebbling, Strategy as Pebbler};
use rifflescrambler::graph::{graph_for_salt, validate_structure};
use rifflescrambler::*;

#[test]
fn fifty_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for _ in 0..50 {
        let g = rng.gen_range(1..=6);
        let lambda = rng.gen_range(1..=3);
        let salt: Vec<u8> = (0..rng.gen_range(8..=32)).map(|_| rng.gen()).collect();
        let pw: Vec<u8> = (0..rng.gen_range(0..=40)).map(|_| rng.gen()).collect();
        let params = HashParams::new(g, lambda, salt).unwrap();
        let phc = hash_password(&params, &pw).unwrap();
        assert_eq!(verify_password(phc.as_str(), &pw), Ok(true));
        let mut wrong = pw.clone();
        wrong.push(0);
        assert_eq!(verify_password(phc.as_str(), &wrong), Ok(false));
    }
}

#[test]
fn one_bit_flip_changes_half_the_digest() {
    let params = HashParams::new(4, 1, common::SALT.to_vec()).unwrap();
    let base_pw = b"avalanche-base-pw".to_vec();
    let base = evaluate(&Sha256Hash, &base_pw, &params).unwrap();
    let mut total = 0u32;
    let mut flips = 0u32;
    for byte in 0..base_pw.len() {
        for bit in 0..8 {
            let mut pw = base_pw.clone();
            pw[byte] ^= 1 << bit;
            let d = evaluate(&Sha256Hash, &pw, &params).unwrap();
            let dist = base.hamming_distance(&d);
            assert!(dist > 64, "flip {byte}.{bit} moved only {dist} bits");
            total += dist;
            flips += 1;
        }
    }
    let mean = total as f64 / flips as f64;
    assert!((120.0..=136.0).contains(&mean), "mean distance {mean}");
}

#[test]
fn salt_changes_graph_and_digest() {
    let salts = common::salts(20, 11);
    let mut digests = std::collections::HashSet::new();
    let mut words = std::collections::HashSet::new();
    for salt in &salts {
        let params = HashParams::new(5, 1, salt.clone()).unwrap();
        digests.insert(evaluate(&Sha256Hash, b"same password", &params).unwrap());
        let graph = graph_for_salt(&Sha256Hash, 5, salt, 1).unwrap();
        words.insert(graph.layer_words().iter().map(|w| w.to_string()).collect::<Vec<_>>());
    }
    assert_eq!(digests.len(), salts.len());
    assert_eq!(words.len(), salts.len());
}

#[test]
fn greedy_never_beats_the_exact_optimum() {
    for salt in common::salts(4, 12) {
        let graph = graph_for_salt(&Sha256Hash, 2, &salt, 1).unwrap();
        let min_budget = (1..=20).find(|&b| common::optimal_placements(&graph, b).is_some()).unwrap();
        assert!(min_budget > 4, "optimum fits in {min_budget} pebbles");
        for budget in min_budget..=12 {
            let best = common::optimal_placements(&graph, budget).unwrap();
            if let Ok(trace) = simulate_pebbling(&graph, Pebbler::GreedyBudget, Some(budget)) {
                assert!(check_legality(&graph, &trace));
                assert!(pebble_metrics(&trace).unwrap().space <= budget as u64);
                assert!(trace.placements >= best, "budget {budget}: {} < optimum {best}", trace.placements);
            }
        }
        // with room for everything the optimum places each node once
        assert_eq!(common::optimal_placements(&graph, 20), Some(graph.node_count() as u64));
    }
}

fn sigma_strategy(g: u32) -> impl Strategy<Value = Permutation> {
    Just((0..1u32 << g).collect::<Vec<u32>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_vec(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn any_sigma_gives_a_valid_graph(g in 1u32..=6, lambda in 1u32..=3, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<u32> = (0..1u32 << g).collect();
        rand::seq::SliceRandom::shuffle(&mut v[..], &mut rng);
        let graph = gen_graph(g, &Permutation::from_vec(v).unwrap(), lambda).unwrap();
        let r = validate_structure(&graph);
        prop_assert!(r.pass, "{:?}", r.failures);
        let honest = simulate_pebbling(&graph, Pebbler::HonestRowwise, None).unwrap();
        prop_assert!(check_legality(&graph, &honest));
        prop_assert_eq!(honest.placements, graph.node_count() as u64);
    }

    #[test]
    fn traced_words_are_balanced(sigma in sigma_strategy(5)) {
        let graph = gen_graph(5, &sigma, 1).unwrap();
        for w in graph.layer_words() {
            prop_assert_eq!(w.hamming_weight(), 16);
        }
    }
}
