//! Shared test support: an independent brute-force cover oracle and seeded
//! instance generators.
//!
//! The oracle deliberately mirrors none of the library's solver structure:
//! it expands its own candidate pool, prunes it by pairwise dominance, and
//! exhausts all covers by assigning the first uncovered member a candidate —
//! no incumbents, no bounds, no lattice DP.

#![allow(dead_code)]

use num_traits::{One, Zero};
use rand::Rng;
use threshold_lab::families::gen_random_family;
use threshold_lab::rng::trial_rng;
use threshold_lab::sets::{SetFamily, SubsetMask};
use threshold_lab::Rational;

/// Minimal scalar interface shared by the f64 and rational oracle runs.
pub trait OracleScalar: Clone + PartialOrd {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
}

impl OracleScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl OracleScalar for Rational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

pub struct OracleCandidate<T> {
    pub mask: u64,
    pub coverage: u64,
    pub cost: T,
}

fn monomial<T: OracleScalar>(q: &[T], mask: u64) -> T {
    SubsetMask::from_bits(mask)
        .elements()
        .fold(T::one(), |acc, x| acc.mul(&q[x]))
}

/// All distinct subsets of the minimal members, with coverage bitmask over
/// the minimal members and monomial cost, pruned by pairwise dominance
/// (drop T when some T' covers at least as much for at most the cost, not
/// both equal).
pub fn oracle_pool<T: OracleScalar>(h: &SetFamily, q: &[T]) -> (Vec<SubsetMask>, Vec<OracleCandidate<T>>) {
    let minimal = h.minimal_elements();
    let members: Vec<SubsetMask> = minimal.members().to_vec();
    let mut masks: Vec<u64> = Vec::new();
    for member in &members {
        let bits = member.bits();
        let mut sub = bits;
        loop {
            masks.push(sub);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & bits;
        }
    }
    masks.sort_unstable();
    masks.dedup();

    let mut pool: Vec<OracleCandidate<T>> = masks
        .into_iter()
        .map(|mask| {
            let coverage = members
                .iter()
                .enumerate()
                .filter(|(_, m)| SubsetMask::from_bits(mask).is_subset_of(**m))
                .fold(0u64, |acc, (i, _)| acc | 1 << i);
            OracleCandidate { mask, coverage, cost: monomial(q, mask) }
        })
        .collect();

    let keep: Vec<bool> = pool
        .iter()
        .enumerate()
        .map(|(i, c)| {
            !pool.iter().enumerate().any(|(j, d)| {
                if i == j {
                    return false;
                }
                let wider = d.coverage & c.coverage == c.coverage;
                let cheaper = d.cost <= c.cost;
                let strict = d.coverage != c.coverage || d.cost < c.cost
                    // exact duplicates in (coverage, cost): keep the first
                    || j < i;
                wider && cheaper && strict
            })
        })
        .collect();
    let mut it = keep.iter();
    pool.retain(|_| *it.next().unwrap());
    (members, pool)
}

/// Exhaustive minimum over all covers drawn from the pruned pool. Every
/// cover must assign the first uncovered member some candidate containing
/// it, so the recursion enumerates them all.
pub fn oracle_exact_cost<T: OracleScalar>(h: &SetFamily, q: &[T]) -> T {
    if h.is_empty() {
        return T::zero();
    }
    if h.contains_empty_set() {
        return T::one();
    }
    let (members, pool) = oracle_pool(h, q);
    let full = (1u64 << members.len()) - 1;

    fn recurse<T: OracleScalar>(pool: &[OracleCandidate<T>], uncovered: u64, acc: T) -> Option<T> {
        if uncovered == 0 {
            return Some(acc);
        }
        let first = uncovered.trailing_zeros();
        let mut best: Option<T> = None;
        for c in pool.iter().filter(|c| c.coverage >> first & 1 == 1) {
            if let Some(total) = recurse(pool, uncovered & !c.coverage, acc.add(&c.cost)) {
                if best.as_ref().is_none_or(|b| total < *b) {
                    best = Some(total);
                }
            }
        }
        best
    }

    recurse(&pool, full, T::zero()).expect("every member covers itself")
}

/// Literal minimum over all 2^P subsets of the pruned pool; only usable for
/// tiny pools, used to cross-check the recursive oracle.
pub fn oracle_all_subsets_cost(h: &SetFamily, q: &[f64]) -> Option<f64> {
    if h.is_empty() {
        return Some(0.0);
    }
    if h.contains_empty_set() {
        return Some(1.0);
    }
    let (members, pool) = oracle_pool(h, q);
    if pool.len() > 20 {
        return None;
    }
    let full = (1u64 << members.len()) - 1;
    let mut best = f64::INFINITY;
    for selection in 0u64..(1 << pool.len()) {
        let mut covered = 0u64;
        let mut cost = 0.0;
        for (i, c) in pool.iter().enumerate() {
            if selection >> i & 1 == 1 {
                covered |= c.coverage;
                cost += c.cost;
            }
        }
        if covered == full && cost < best {
            best = cost;
        }
    }
    Some(best)
}

/// Deterministic random instance: a family plus a uniform q value.
pub struct RandomInstance {
    pub family: SetFamily,
    pub q_uniform: f64,
}

pub fn random_instance(seed: u64, max_n: usize, max_members: usize, max_ell: usize) -> RandomInstance {
    let mut rng = trial_rng(seed, 0);
    let n = rng.random_range(2..=max_n);
    let ell = rng.random_range(1..=max_ell.min(n));
    let count = rng.random_range(1..=max_members);
    // The generator rejects infeasible counts; clamp to what exists.
    let available: usize = (1..=ell)
        .map(|s| (0..s).fold(1usize, |acc, t| acc * (n - t) / (t + 1)))
        .sum();
    let count = count.min(available);
    let family = gen_random_family(n, count, ell, seed ^ 0x5eed).expect("feasible instance");
    let q_uniform = 0.05 + 0.9 * rng.random::<f64>();
    RandomInstance { family, q_uniform }
}
