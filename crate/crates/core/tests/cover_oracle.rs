//! The exact solver against an independent exhaustive oracle.

mod common;

use common::{oracle_all_subsets_cost, oracle_exact_cost, random_instance};
use threshold_lab::cover::{exact_cost, exact_cost_rational, greedy_cost, is_valid_cover};
use threshold_lab::rng::trial_rng;
use threshold_lab::{Caps, ProbVector, Rational};

use rand::Rng;

#[test]
fn solver_matches_oracle_on_random_instances() {
    let caps = Caps::default();
    for seed in 0..60 {
        let inst = random_instance(seed, 8, 6, 4);
        let q = ProbVector::uniform(inst.family.ground(), inst.q_uniform).unwrap();
        let solution = exact_cost(&inst.family, &q, &caps).unwrap();
        let oracle = oracle_exact_cost(&inst.family, q.values());
        assert!(
            (solution.cost - oracle).abs() <= 1e-12,
            "seed {seed}: solver {} vs oracle {oracle}",
            solution.cost
        );
        assert!(is_valid_cover(&inst.family, &solution.cover), "seed {seed}: invalid witness");

        // The all-subsets oracle cross-checks the recursive one when small.
        if let Some(flat) = oracle_all_subsets_cost(&inst.family, q.values()) {
            assert!((flat - oracle).abs() <= 1e-12, "seed {seed}: oracle mismatch");
        }

        let greedy = greedy_cost(&inst.family, &q);
        assert!(greedy.cost >= solution.cost - 1e-12, "seed {seed}: greedy beat exact");
        assert!(is_valid_cover(&inst.family, &greedy.cover));
    }
}

#[test]
fn solver_matches_oracle_in_rational_mode() {
    let caps = Caps::default();
    for seed in 100..120 {
        let inst = random_instance(seed, 7, 5, 3);
        let mut rng = trial_rng(seed, 1);
        let q_rat: Vec<Rational> = (0..inst.family.ground().size())
            .map(|_| Rational::new((1 + rng.random_range(0..98i64)).into(), 100.into()))
            .collect();
        let solution = exact_cost_rational(&inst.family, &q_rat, &caps).unwrap();
        let oracle = oracle_exact_cost(&inst.family, &q_rat);
        assert_eq!(solution.cost, oracle, "seed {seed}: exact rational mismatch");
        assert!(is_valid_cover(&inst.family, &solution.cover));
    }
}

#[test]
fn branch_and_bound_matches_oracle() {
    // Force the branch-and-bound path by disabling the DP cap.
    let caps = Caps { dp_members: 0, ..Caps::default() };
    for seed in 200..230 {
        let inst = random_instance(seed, 8, 6, 3);
        let q = ProbVector::uniform(inst.family.ground(), inst.q_uniform).unwrap();
        let solution = exact_cost(&inst.family, &q, &caps).unwrap();
        let oracle = oracle_exact_cost(&inst.family, q.values());
        assert!(
            (solution.cost - oracle).abs() <= 1e-12,
            "seed {seed}: bnb {} vs oracle {oracle}",
            solution.cost
        );
    }
}

#[test]
fn subadditivity_on_random_splits() {
    let caps = Caps::default();
    for seed in 300..340 {
        let inst = random_instance(seed, 8, 6, 4);
        if inst.family.len() < 2 {
            continue;
        }
        let q = ProbVector::uniform(inst.family.ground(), inst.q_uniform).unwrap();
        let mut rng = trial_rng(seed, 2);
        let split_at = rng.random_range(1..inst.family.len());
        let members = inst.family.members();
        let h1 = threshold_lab::SetFamily::new(
            inst.family.ground().clone(),
            members[..split_at].iter().copied(),
        )
        .unwrap();
        let h2 = threshold_lab::SetFamily::new(
            inst.family.ground().clone(),
            members[split_at..].iter().copied(),
        )
        .unwrap();
        let whole = exact_cost(&inst.family, &q, &caps).unwrap().cost;
        let parts = exact_cost(&h1, &q, &caps).unwrap().cost
            + exact_cost(&h2, &q, &caps).unwrap().cost;
        assert!(whole <= parts + 1e-12, "seed {seed}: {whole} > {parts}");
    }
}

#[test]
fn cost_monotone_in_uniform_q() {
    let caps = Caps::default();
    for seed in 400..420 {
        let inst = random_instance(seed, 7, 5, 3);
        let ground = inst.family.ground();
        let mut last = 0.0;
        for step in 1..=9 {
            let q = ProbVector::uniform(ground, step as f64 / 10.0).unwrap();
            let cost = exact_cost(&inst.family, &q, &caps).unwrap().cost;
            assert!(cost >= last - 1e-12, "seed {seed}: cost dipped at q = 0.{step}");
            last = cost;
        }
    }
}

#[test]
fn cost_bounded_by_expected_hits_and_one() {
    let caps = Caps::default();
    for seed in 500..540 {
        let inst = random_instance(seed, 8, 6, 4);
        let q = ProbVector::uniform(inst.family.ground(), inst.q_uniform).unwrap();
        let cost = exact_cost(&inst.family, &q, &caps).unwrap().cost;
        let e_min = threshold_lab::measure::expected_hits(&inst.family.minimal_elements(), &q);
        assert!(cost <= e_min.min(1.0) + 1e-12, "seed {seed}");
    }
}
