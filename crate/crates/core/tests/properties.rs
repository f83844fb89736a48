//! Property tests for the structural invariants.

mod common;

use proptest::prelude::*;
use threshold_lab::cover::{exact_cost, greedy_cost, is_valid_cover};
use threshold_lab::fragment::{fragments, minimal_fragments, split_large_small};
use threshold_lab::measure::{expected_hits, prob_upset_exact};
use threshold_lab::sets::{parse_family, serialize_family, GroundSet, SetFamily, SubsetMask};
use threshold_lab::{Caps, ProbVector};

/// A random family over up to 8 elements.
fn family_strategy() -> impl Strategy<Value = SetFamily> {
    (1usize..=8).prop_flat_map(|n| {
        let mask_max = (1u64 << n) - 1;
        prop::collection::vec(0..=mask_max, 0..10).prop_map(move |masks| {
            SetFamily::new(GroundSet::new(n).unwrap(), masks.into_iter().map(SubsetMask::from_bits))
                .unwrap()
        })
    })
}

fn subset_strategy(n: usize) -> impl Strategy<Value = SubsetMask> {
    (0..=((1u64 << n) - 1)).prop_map(SubsetMask::from_bits)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minimal_is_an_idempotent_antichain(family in family_strategy()) {
        let minimal = family.minimal_elements();
        prop_assert!(minimal.is_antichain());
        prop_assert_eq!(minimal.minimal_elements(), minimal.clone());
        // Same up-closure.
        let n = family.ground().size();
        for w in 0..(1u64 << n) {
            let w = SubsetMask::from_bits(w);
            prop_assert_eq!(family.contains_member(w), minimal.contains_member(w));
        }
    }

    #[test]
    fn membership_is_up_monotone(family in family_strategy()) {
        let n = family.ground().size();
        for w in 0..(1u64 << n) {
            let w = SubsetMask::from_bits(w);
            if family.contains_member(w) {
                for x in 0..n {
                    let bigger = w.union(SubsetMask::from_bits(1 << x));
                    prop_assert!(family.contains_member(bigger));
                }
            }
        }
    }

    #[test]
    fn serialization_roundtrips(family in family_strategy()) {
        let text = serialize_family(&family, None);
        let back = parse_family(text.as_bytes()).unwrap();
        prop_assert_eq!(back.family, family);
    }

    #[test]
    fn upset_probability_laws(family in family_strategy(), p in 0.05f64..0.95) {
        let caps = Caps::default();
        let pv = ProbVector::uniform(family.ground(), p).unwrap();
        let prob = prob_upset_exact(&family, &pv, &caps).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&prob));

        let minimal = family.minimal_elements();
        let via_minimal = prob_upset_exact(&minimal, &pv, &caps).unwrap();
        prop_assert!((prob - via_minimal).abs() < 1e-12);

        // Union bound against the expected hit count of the minimal family.
        prop_assert!(prob <= expected_hits(&minimal, &pv) + 1e-12);
    }

    #[test]
    fn upset_probability_monotone_in_p(family in family_strategy()) {
        let caps = Caps::default();
        let mut last = -1.0;
        for step in 1..=9 {
            let pv = ProbVector::uniform(family.ground(), step as f64 / 10.0).unwrap();
            let prob = prob_upset_exact(&family, &pv, &caps).unwrap();
            prop_assert!(prob >= last - 1e-12);
            last = prob;
        }
    }

    #[test]
    fn fragment_laws(family in family_strategy(), witness_bits in any::<u64>()) {
        let n = family.ground().size();
        let w = SubsetMask::from_bits(witness_bits & ((1 << n) - 1));

        // Fragments against nothing are the family itself.
        prop_assert_eq!(fragments(&family, SubsetMask::EMPTY), family.clone());
        prop_assert_eq!(minimal_fragments(&family, SubsetMask::EMPTY), family.minimal_elements());

        // Every member contains one of its minimal fragments.
        let fstar = minimal_fragments(&family, w);
        for &s in family.members() {
            prop_assert!(fstar.contains_member(s));
        }

        // {∅} appears exactly when some member is swallowed by W.
        let swallowed = family.members().iter().any(|m| m.is_subset_of(w));
        prop_assert_eq!(fstar.contains_empty_set(), swallowed);

        // The split partitions the minimal fragments.
        for m in 0..=n + 1 {
            let (large, small) = split_large_small(&family, w, m);
            prop_assert_eq!(large.len() + small.len(), fstar.len());
            prop_assert!(large.members().iter().all(|t| t.size() >= m));
            prop_assert!(small.members().iter().all(|t| t.size() < m));
        }
    }

    #[test]
    fn cover_witnesses_are_valid(family in family_strategy(), q in 0.05f64..0.95) {
        let caps = Caps::default();
        let pv = ProbVector::uniform(family.ground(), q).unwrap();
        let exact = exact_cost(&family, &pv, &caps).unwrap();
        prop_assert!(is_valid_cover(&family, &exact.cover));
        prop_assert!((exact.cost - expected_hits(&exact.cover, &pv)).abs() < 1e-12);

        let greedy = greedy_cost(&family, &pv);
        prop_assert!(is_valid_cover(&family, &greedy.cover));
        prop_assert!(greedy.cost >= exact.cost - 1e-12);
    }

    #[test]
    fn upset_membership_matches_enumeration(family in family_strategy(), sample in any::<u64>()) {
        let n = family.ground().size();
        let w = SubsetMask::from_bits(sample & ((1 << n) - 1));
        let expected = family.members().iter().any(|m| m.is_subset_of(w));
        prop_assert_eq!(family.contains_member(w), expected);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn sampled_subsets_respect_ground(n in 1usize..=8, seed in any::<u64>()) {
        let ground = GroundSet::new(n).unwrap();
        let q = ProbVector::uniform(&ground, 0.5).unwrap();
        let mut rng = threshold_lab::rng::trial_rng(seed, 0);
        let s = threshold_lab::measure::sample(&q, &mut rng);
        prop_assert!(ground.validate_mask(s).is_ok());
    }

    #[test]
    fn subset_strategy_masks_are_valid(n in 1usize..=8) {
        let ground = GroundSet::new(n).unwrap();
        proptest!(|(mask in subset_strategy(n))| {
            prop_assert!(ground.validate_mask(mask).is_ok());
        });
    }
}
