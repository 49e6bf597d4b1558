//! Decoder behavior: recovery, repair, optimality and budgets.

mod common;

use common::{build_scores, lab};
use tap_core::{
    brute_force_decode, exact_decode, gen_adversarial, gen_graph, gen_scores, greedy_decode,
    validate, Budget, DecodeOptions, EdgeLabel, GenParams, RoleInventory,
};

fn small_inventory() -> RoleInventory {
    RoleInventory::new(["VALUE", "WHOLE", "TIME"], "VALUE").unwrap()
}

fn small_params(seed: u64) -> GenParams {
    GenParams {
        seed,
        inventory: small_inventory(),
        n_frames: 1..=1,
        facts_per_frame: 2..=2,
        roles_per_fact: 1..=1,
        distractor_count: 1,
        ..GenParams::default()
    }
}

#[test]
fn noise_free_scores_recover_gold_for_both_decoders() {
    for seed in 0..50 {
        let (gold, _) = gen_graph(&GenParams {
            seed,
            ..GenParams::default()
        });
        let scores = gen_scores(&gold, 0.0, seed, 2);
        let greedy = greedy_decode(&scores);
        assert!(
            greedy.graph.same_structure(&gold),
            "greedy missed gold at seed {}",
            seed
        );
        assert!((greedy.objective - 0.0).abs() < 1e-9);
        let exact = exact_decode(&scores, &DecodeOptions::default()).unwrap();
        assert!(exact.graph.same_structure(&gold), "exact missed gold at seed {}", seed);
        assert!(exact.optimal);
        assert!((exact.objective - 0.0).abs() < 1e-9);
    }
}

#[test]
fn greedy_unique_facts_keeps_strongest_fact_edge() {
    // V1 W1 T1 T2 V2 W2; both TIME spans claim V1 by FACT, without
    // EQUIVALENCE. The 0.9 attachment survives, the 0.6 one goes.
    let inv = small_inventory();
    let spans = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6)];
    let (v, w, t, none) = (0, 1, 2, 3);
    let scores = build_scores(
        &inv,
        &spans,
        &[(v, 0.9), (w, 0.9), (t, 0.9), (t, 0.9), (v, 0.9), (w, 0.9)],
        &[
            ((0, 1), lab(EdgeLabel::Fact), 0.9),
            ((0, 2), lab(EdgeLabel::Fact), 0.9),
            ((0, 3), lab(EdgeLabel::Fact), 0.6),
            ((0, 4), lab(EdgeLabel::Analogy), 0.9),
            ((1, 5), lab(EdgeLabel::Analogy), 0.9),
            ((4, 5), lab(EdgeLabel::Fact), 0.9),
        ],
        0.8,
    );
    let _ = none;
    let out = greedy_decode(&scores);
    assert!(validate(&out.graph).is_empty());
    let texts: Vec<(usize, usize)> = out
        .graph
        .vertices()
        .values()
        .map(|vx| (vx.start, vx.end))
        .collect();
    assert!(texts.contains(&(2, 3)), "kept the 0.9 TIME attachment");
    assert!(!texts.contains(&(3, 4)), "dropped the 0.6 TIME attachment");
}

#[test]
fn greedy_discards_unsupported_value_cluster() {
    // Analogous values without an analogous argument pair: everything goes.
    let inv = small_inventory();
    let spans = [(0, 1), (1, 2), (2, 3), (3, 4)];
    let (v, w, _t, _none) = (0, 1, 2, 3);
    let scores = build_scores(
        &inv,
        &spans,
        &[(v, 0.9), (w, 0.9), (v, 0.9), (w, 0.9)],
        &[
            ((0, 1), lab(EdgeLabel::Fact), 0.9),
            ((0, 2), lab(EdgeLabel::Analogy), 0.9),
            ((2, 3), lab(EdgeLabel::Fact), 0.9),
            // (1, 3) stays NONE: no analogous argument pair.
        ],
        0.8,
    );
    let out = greedy_decode(&scores);
    assert!(out.graph.is_empty());
    assert!(validate(&out.graph).is_empty());
}

#[test]
fn exact_matches_brute_force_on_small_instances() {
    for seed in 0..120 {
        let (gold, _) = gen_graph(&small_params(seed));
        let noise = [0.1, 0.3, 0.5, 0.8][seed as usize % 4];
        let scores = gen_scores(&gold, noise, seed.wrapping_mul(31) + 1, 1);
        if scores.n_spans() > 5 {
            continue;
        }
        let exact = exact_decode(&scores, &DecodeOptions::default()).unwrap();
        assert!(exact.optimal, "budget hit on tiny instance, seed {}", seed);
        let brute = brute_force_decode(&scores, 3).unwrap();
        assert!(
            (exact.objective - brute.objective).abs() < 1e-9,
            "seed {}: exact {} vs brute {}",
            seed,
            exact.objective,
            brute.objective
        );
    }
}

#[test]
fn exact_dominates_greedy_on_noisy_instances() {
    for seed in 0..100 {
        let (gold, _) = gen_graph(&GenParams {
            seed,
            ..GenParams::default()
        });
        let scores = gen_scores(&gold, 0.4, seed + 999, 2);
        let greedy = greedy_decode(&scores);
        let exact = exact_decode(&scores, &DecodeOptions::default()).unwrap();
        assert!(
            exact.objective >= greedy.objective - 1e-9,
            "seed {}: exact {} < greedy {}",
            seed,
            exact.objective,
            greedy.objective
        );
    }
}

#[test]
fn decoder_outputs_always_validate() {
    for seed in 0..100 {
        let (gold, _) = gen_graph(&GenParams {
            seed,
            n_frames: 1..=2,
            ..GenParams::default()
        });
        for &noise in &[0.2, 0.6, 1.0] {
            let scores = gen_scores(&gold, noise, seed * 7 + noise.to_bits() as u64 % 97, 2);
            let greedy = greedy_decode(&scores);
            assert!(
                validate(&greedy.graph).is_empty(),
                "greedy violation at seed {} noise {}",
                seed,
                noise
            );
            let exact = exact_decode(
                &scores,
                &DecodeOptions {
                    budget: Budget {
                        max_nodes: 20_000,
                        max_millis: 5_000,
                    },
                    ..DecodeOptions::default()
                },
            )
            .unwrap();
            assert!(
                validate(&exact.graph).is_empty(),
                "exact violation at seed {} noise {}",
                seed,
                noise
            );
        }
    }
}

#[test]
fn adversarial_equivalence_trap_recovers_dropped_fact() {
    for seed in [0u64, 2, 4, 6] {
        let adv = gen_adversarial(seed);
        let greedy = greedy_decode(&adv.scores);
        assert!(greedy.graph.is_empty(), "greedy should drop everything");
        let exact = exact_decode(&adv.scores, &DecodeOptions::default()).unwrap();
        assert!(exact.optimal);
        assert!(
            exact.objective > greedy.objective + 1.0,
            "exact should escape the trap decisively"
        );
        assert!(
            exact.graph.same_structure(&adv.intended),
            "seed {}: exact should recover the intended graph",
            seed
        );
    }
}

#[test]
fn adversarial_quadrangle_trap_forces_argument_analogy() {
    for seed in [1u64, 3, 5, 7] {
        let adv = gen_adversarial(seed);
        let greedy = greedy_decode(&adv.scores);
        assert!(greedy.graph.is_empty());
        let exact = exact_decode(&adv.scores, &DecodeOptions::default()).unwrap();
        assert!(exact.graph.same_structure(&adv.intended), "seed {}", seed);
    }
}

#[test]
fn adversarial_instances_match_brute_force() {
    for seed in 0..10 {
        let adv = gen_adversarial(seed);
        let exact = exact_decode(&adv.scores, &DecodeOptions::default()).unwrap();
        let brute = brute_force_decode(&adv.scores, 3).unwrap();
        assert!(
            (exact.objective - brute.objective).abs() < 1e-9,
            "seed {}",
            seed
        );
    }
}

#[test]
fn brute_force_rejects_large_instances() {
    let (gold, _) = gen_graph(&GenParams {
        seed: 3,
        n_frames: 2..=2,
        facts_per_frame: 3..=3,
        roles_per_fact: 2..=2,
        ..GenParams::default()
    });
    let scores = gen_scores(&gold, 0.1, 5, 2);
    assert!(scores.n_spans() > 5);
    assert!(brute_force_decode(&scores, 3).is_err());
    let (small_gold, _) = gen_graph(&small_params(1));
    let small = gen_scores(&small_gold, 0.1, 5, 0);
    assert!(brute_force_decode(&small, 4).is_err());
}

#[test]
fn budget_exhaustion_returns_feasible_incumbent() {
    let (gold, _) = gen_graph(&GenParams {
        seed: 3,
        n_frames: 4..=4,
        facts_per_frame: 4..=4,
        roles_per_fact: 3..=3,
        shared_fraction: 0.4,
        ..GenParams::default()
    });
    let scores = gen_scores(&gold, 0.9, 42, 11);
    assert_eq!(scores.n_spans(), 64, "instance should have 64 candidates");
    let out = exact_decode(
        &scores,
        &DecodeOptions {
            budget: Budget {
                max_nodes: 10_000,
                max_millis: 30_000,
            },
            ..DecodeOptions::default()
        },
    )
    .unwrap();
    assert!(!out.optimal);
    assert!(validate(&out.graph).is_empty());
}

#[test]
fn require_analogy_reports_when_nothing_feasible() {
    // Two spans cannot support an analogy (the quadrangle needs four), so
    // requiring one must fail.
    let inv = small_inventory();
    let scores = build_scores(
        &inv,
        &[(0, 1), (1, 2)],
        &[(0, 0.9), (1, 0.9)],
        &[((0, 1), lab(EdgeLabel::Fact), 0.9)],
        0.8,
    );
    let out = exact_decode(
        &scores,
        &DecodeOptions {
            require_analogy: true,
            ..DecodeOptions::default()
        },
    );
    assert!(out.is_err());
    // Without the requirement the empty graph is the honest answer here.
    let out = exact_decode(&scores, &DecodeOptions::default()).unwrap();
    assert!(out.graph.is_empty());
    assert!(out.optimal);
}

#[test]
fn decoders_are_deterministic() {
    let (gold, _) = gen_graph(&GenParams {
        seed: 5,
        ..GenParams::default()
    });
    let scores = gen_scores(&gold, 0.7, 123, 2);
    let a = exact_decode(&scores, &DecodeOptions::default()).unwrap();
    let b = exact_decode(&scores, &DecodeOptions::default()).unwrap();
    assert_eq!(tap_core::emit_graph(&a.graph), tap_core::emit_graph(&b.graph));
    assert_eq!(a.objective, b.objective);
    assert_eq!(a.nodes_explored, b.nodes_explored);
    let g1 = greedy_decode(&scores);
    let g2 = greedy_decode(&scores);
    assert_eq!(tap_core::emit_graph(&g1.graph), tap_core::emit_graph(&g2.graph));
}
