//! Exact minimum-cost covers and the q-smallness decision.
//!
//! A family `G` covers `H` when every member of `H` contains some member of
//! `G`; the q-cost of `H` is the least `e_q(G)` over covers. A cover set
//! only ever covers the members it is contained in, so an optimal cover can
//! be drawn from the subsets of the minimal members — that pool is the
//! entire search space here.
//!
//! Two exact paths share one generic implementation: a bottom-up DP over the
//! `2^h` lattice of covered-member subsets when the minimal member count `h`
//! is small, and branch-and-bound on the least-covered member otherwise.
//! Costs are `f64` by default; the rational entry point runs the same solver
//! on exact arithmetic for certification-grade answers.

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::measure::{expected_hits, ProbVector};
use crate::sets::{SetFamily, SubsetMask};
use crate::Rational;

/// Whether a solution is proven optimal or merely a valid upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverStatus {
    ExactOptimal,
    UpperBound,
}

/// A witness cover with its cost.
#[derive(Debug, Clone, Serialize)]
pub struct CoverSolution {
    pub cover: SetFamily,
    pub cost: f64,
    pub status: CoverStatus,
    pub nodes_explored: u64,
}

/// Same witness, exact arithmetic.
#[derive(Debug, Clone)]
pub struct RationalCoverSolution {
    pub cover: SetFamily,
    pub cost: Rational,
    pub status: CoverStatus,
    pub nodes_explored: u64,
}

/// Comparison slack for floating-point cost assertions.
pub const COST_SLACK: f64 = 1e-12;

/// Scalar the solver is generic over. `f64` for everyday runs, `Rational`
/// for certification runs.
pub trait CostScalar: Clone + PartialOrd {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
}

impl CostScalar for f64 {
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

impl CostScalar for Rational {
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

/// True iff every member of `h` contains some member of `cover`.
pub fn is_valid_cover(h: &SetFamily, cover: &SetFamily) -> bool {
    h.members().iter().all(|&m| cover.members().iter().any(|&t| t.is_subset_of(m)))
}

/// Exact q-cost with an optimal witness cover.
pub fn exact_cost(h: &SetFamily, q: &ProbVector, caps: &Caps) -> Result<CoverSolution> {
    let weights: Vec<f64> = q.values().to_vec();
    check_len(h, weights.len())?;
    let out = solve_family(h, &weights, caps)?;
    Ok(CoverSolution {
        cover: out.cover,
        cost: out.cost,
        status: CoverStatus::ExactOptimal,
        nodes_explored: out.nodes,
    })
}

/// Exact q-cost in rational arithmetic; `q` entries must lie strictly in (0,1).
pub fn exact_cost_rational(
    h: &SetFamily,
    q: &[Rational],
    caps: &Caps,
) -> Result<RationalCoverSolution> {
    check_len(h, q.len())?;
    let (zero, one) = (<Rational as Zero>::zero(), <Rational as One>::one());
    for v in q {
        if v <= &zero || v >= &one {
            return Err(Error::InvalidArgument(format!(
                "rational probability {v} outside the open interval (0,1)"
            )));
        }
    }
    let out = solve_family(h, q, caps)?;
    Ok(RationalCoverSolution {
        cover: out.cover,
        cost: out.cost,
        status: CoverStatus::ExactOptimal,
        nodes_explored: out.nodes,
    })
}

/// Decide q-smallness: exact cost at most 1/2.
pub fn is_q_small(h: &SetFamily, q: &ProbVector, caps: &Caps) -> Result<(bool, CoverSolution)> {
    let solution = exact_cost(h, q, caps)?;
    Ok((solution.cost <= 0.5, solution))
}

fn check_len(h: &SetFamily, got: usize) -> Result<()> {
    let want = h.ground().size();
    if got != want {
        return Err(Error::ProbLength { got, want });
    }
    Ok(())
}

struct SolveOutcome<T> {
    cover: SetFamily,
    cost: T,
    nodes: u64,
}

fn solve_family<T: CostScalar>(h: &SetFamily, q: &[T], caps: &Caps) -> Result<SolveOutcome<T>> {
    // Empty family: nothing to cover. Family containing ∅: only ∅ covers ∅.
    if h.is_empty() {
        return Ok(SolveOutcome {
            cover: SetFamily::new(h.ground().clone(), [])?,
            cost: T::zero(),
            nodes: 0,
        });
    }
    if h.contains_empty_set() {
        return Ok(SolveOutcome {
            cover: SetFamily::new(h.ground().clone(), [SubsetMask::EMPTY])?,
            cost: T::one(),
            nodes: 0,
        });
    }

    let minimal = h.minimal_elements();
    let members: Vec<SubsetMask> = minimal.members().to_vec();
    let pool = build_pool(&members, q, caps)?;

    let (masks, cost, nodes) = if members.len() <= caps.dp_members {
        solve_dp(&members, &pool)
    } else if members.len() <= caps.bnb_members {
        solve_branch_and_bound(&members, &pool)
    } else {
        return Err(Error::CapExceeded {
            what: "minimal member count",
            value: members.len(),
            cap: caps.bnb_members,
            hint: "use greedy_cost for an upper bound",
        });
    };

    let cover = SetFamily::new(h.ground().clone(), masks.iter().map(|&m| SubsetMask::from_bits(m)))?;
    debug_assert!(is_valid_cover(h, &cover));
    Ok(SolveOutcome { cover, cost, nodes })
}

/// One entry of the candidate pool: a set, the members it covers, its cost.
struct Candidate<T> {
    mask: u64,
    coverage: u64,
    cost: T,
}

/// Expand all subsets of the minimal members, dedup, keep the cheapest
/// candidate per coverage class, then drop dominated candidates (worse
/// coverage at no lower cost). The pairwise pass is skipped on oversized
/// pools; it is an optimization, not needed for exactness.
fn build_pool<T: CostScalar>(
    members: &[SubsetMask],
    q: &[T],
    caps: &Caps,
) -> Result<Vec<Candidate<T>>> {
    let projected: u128 = members.iter().map(|m| 1u128 << m.size()).sum();
    if projected > caps.pool_limit as u128 {
        return Err(Error::CapExceeded {
            what: "candidate pool size",
            value: projected.min(usize::MAX as u128) as usize,
            cap: caps.pool_limit,
            hint: "use greedy_cost for an upper bound",
        });
    }

    let mut seen: HashMap<u64, u64> = HashMap::new();
    for &member in members {
        let bits = member.bits();
        // Standard submask walk, including ∅.
        let mut sub = bits;
        loop {
            seen.entry(sub).or_insert_with(|| {
                members
                    .iter()
                    .enumerate()
                    .filter(|(_, m)| SubsetMask::from_bits(sub).is_subset_of(**m))
                    .fold(0u64, |acc, (i, _)| acc | 1 << i)
            });
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & bits;
        }
    }

    // Cheapest candidate per coverage class; ties broken toward the
    // serialization order so witnesses are reproducible.
    let mut best_by_coverage: HashMap<u64, Candidate<T>> = HashMap::new();
    for (mask, coverage) in seen {
        let cost = monomial(q, mask);
        let key = SubsetMask::from_bits(mask).sort_key();
        match best_by_coverage.get(&coverage) {
            Some(cur)
                if cur.cost < cost
                    || (cur.cost == cost && SubsetMask::from_bits(cur.mask).sort_key() <= key) => {}
            _ => {
                best_by_coverage.insert(coverage, Candidate { mask, coverage, cost });
            }
        }
    }
    let mut pool: Vec<Candidate<T>> = best_by_coverage.into_values().collect();
    pool.sort_by_key(|c| SubsetMask::from_bits(c.mask).sort_key());

    if pool.len() <= 4096 {
        let dominated: Vec<bool> = pool
            .iter()
            .map(|c| {
                pool.iter().any(|d| {
                    d.coverage & c.coverage == c.coverage
                        && (d.coverage != c.coverage)
                        && d.cost <= c.cost
                })
            })
            .collect();
        let mut it = dominated.iter();
        pool.retain(|_| !*it.next().unwrap());
    }
    Ok(pool)
}

fn monomial<T: CostScalar>(q: &[T], mask: u64) -> T {
    SubsetMask::from_bits(mask)
        .elements()
        .fold(T::one(), |acc, x| acc.mul(&q[x]))
}

/// Bottom-up DP over covered-member subsets. `dp[mask]` is the least cost
/// covering exactly the members in `mask`; each state branches on the
/// lowest-indexed uncovered member, which any cover must handle.
fn solve_dp<T: CostScalar>(
    members: &[SubsetMask],
    pool: &[Candidate<T>],
) -> (Vec<u64>, T, u64) {
    let h = members.len();
    let full: u64 = (1 << h) - 1;
    let size = 1usize << h;

    let mut by_member: Vec<Vec<usize>> = vec![Vec::new(); h];
    for (ci, c) in pool.iter().enumerate() {
        for i in SubsetMask::from_bits(c.coverage).elements() {
            by_member[i].push(ci);
        }
    }

    let mut dp: Vec<Option<T>> = vec![None; size];
    let mut sets: Vec<u16> = vec![0; size];
    let mut choice: Vec<u32> = vec![u32::MAX; size];
    dp[0] = Some(T::zero());
    let mut nodes = 0u64;

    for mask in 1..=full {
        let i = mask.trailing_zeros() as usize;
        let mut best: Option<(T, u16, u32)> = None;
        for &ci in &by_member[i] {
            nodes += 1;
            let rest = (mask & !pool[ci].coverage) as usize;
            let Some(rest_cost) = dp[rest].as_ref() else { continue };
            let cost = rest_cost.add(&pool[ci].cost);
            let nsets = sets[rest] + 1;
            let better = match &best {
                None => true,
                Some((bc, bs, bi)) => {
                    cost < *bc
                        || (cost == *bc && (nsets < *bs || (nsets == *bs && (ci as u32) < *bi)))
                }
            };
            if better {
                best = Some((cost, nsets, ci as u32));
            }
        }
        // Every member of an antichain covers itself, so each state is
        // reachable.
        let (cost, nsets, ci) = best.expect("member has no covering candidate");
        dp[mask as usize] = Some(cost);
        sets[mask as usize] = nsets;
        choice[mask as usize] = ci;
    }

    let mut masks = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let ci = choice[mask as usize] as usize;
        masks.push(pool[ci].mask);
        mask &= !pool[ci].coverage;
    }
    let cost = dp[full as usize].clone().unwrap();
    (masks, cost, nodes)
}

/// Branch-and-bound: branch on the uncovered member with the fewest
/// covering candidates, seed the incumbent greedily (cheapest candidate
/// per member), prune on partial cost alone.
fn solve_branch_and_bound<T: CostScalar>(
    members: &[SubsetMask],
    pool: &[Candidate<T>],
) -> (Vec<u64>, T, u64) {
    struct Search<'a, T> {
        pool: &'a [Candidate<T>],
        by_member: Vec<Vec<usize>>,
        best_cost: Option<T>,
        best_masks: Vec<u64>,
        chosen: Vec<usize>,
        nodes: u64,
    }

    impl<T: CostScalar> Search<'_, T> {
        fn run(&mut self, uncovered: u64, partial: T) {
            self.nodes += 1;
            if uncovered == 0 {
                let better = match &self.best_cost {
                    None => true,
                    Some(b) => {
                        partial < *b || (partial == *b && self.chosen.len() < self.best_masks.len())
                    }
                };
                if better {
                    self.best_cost = Some(partial);
                    self.best_masks = self.chosen.iter().map(|&ci| self.pool[ci].mask).collect();
                }
                return;
            }
            let branch = SubsetMask::from_bits(uncovered)
                .elements()
                .min_by_key(|&i| (self.by_member[i].len(), i))
                .unwrap();
            for idx in 0..self.by_member[branch].len() {
                let ci = self.by_member[branch][idx];
                let cost = partial.add(&self.pool[ci].cost);
                if let Some(best) = &self.best_cost {
                    // On a cost tie only a strictly smaller cover can win.
                    if cost > *best
                        || (cost == *best && self.chosen.len() + 1 >= self.best_masks.len())
                    {
                        continue;
                    }
                }
                self.chosen.push(ci);
                self.run(uncovered & !self.pool[ci].coverage, cost);
                self.chosen.pop();
            }
        }
    }

    let h = members.len();
    let mut by_member: Vec<Vec<usize>> = vec![Vec::new(); h];
    for (ci, c) in pool.iter().enumerate() {
        for i in SubsetMask::from_bits(c.coverage).elements() {
            by_member[i].push(ci);
        }
    }

    // Greedy incumbent: cheapest covering candidate per member, deduped.
    let mut seed: Vec<usize> = (0..h)
        .map(|i| {
            *by_member[i]
                .iter()
                .min_by(|&&a, &&b| {
                    pool[a].cost.partial_cmp(&pool[b].cost).unwrap().then(a.cmp(&b))
                })
                .expect("every member covers itself")
        })
        .collect();
    seed.sort_unstable();
    seed.dedup();
    let seed_cost = seed.iter().fold(T::zero(), |acc, &ci| acc.add(&pool[ci].cost));

    let mut search = Search {
        pool,
        by_member,
        best_cost: Some(seed_cost),
        best_masks: seed.iter().map(|&ci| pool[ci].mask).collect(),
        chosen: Vec::new(),
        nodes: 0,
    };
    search.run((1u64 << h) - 1, T::zero());
    (search.best_masks, search.best_cost.unwrap(), search.nodes)
}

/// Greedy weighted cover: always a valid cover, never claimed optimal.
///
/// Candidates are the minimal members, the single elements, and ∅; picks by
/// cost per newly covered member, then keeps the best of the greedy result
/// and the two trivial covers (the members themselves, `{∅}`).
pub fn greedy_cost(h: &SetFamily, q: &ProbVector) -> CoverSolution {
    let ground = h.ground().clone();
    if h.is_empty() {
        return CoverSolution {
            cover: SetFamily::new(ground, []).unwrap(),
            cost: 0.0,
            status: CoverStatus::UpperBound,
            nodes_explored: 0,
        };
    }
    if h.contains_empty_set() {
        return CoverSolution {
            cover: SetFamily::new(ground, [SubsetMask::EMPTY]).unwrap(),
            cost: 1.0,
            status: CoverStatus::UpperBound,
            nodes_explored: 0,
        };
    }

    let minimal = h.minimal_elements();
    let members = minimal.members();
    let support = members.iter().fold(SubsetMask::EMPTY, |acc, &m| acc.union(m));

    let mut candidates: Vec<SubsetMask> = members.to_vec();
    candidates.extend(support.elements().map(|x| SubsetMask::from_bits(1 << x)));
    candidates.sort_by_key(|c| c.sort_key());
    candidates.dedup();

    let coverage = |t: SubsetMask, uncovered: &[bool]| -> usize {
        members
            .iter()
            .enumerate()
            .filter(|(i, m)| uncovered[*i] && t.is_subset_of(**m))
            .count()
    };

    let mut uncovered = vec![true; members.len()];
    let mut remaining = members.len();
    let mut picked: Vec<SubsetMask> = Vec::new();
    let mut total = 0.0;
    let mut nodes = 0u64;
    while remaining > 0 {
        let mut best: Option<(f64, SubsetMask, usize)> = None;
        for &t in &candidates {
            nodes += 1;
            let newly = coverage(t, &uncovered);
            if newly == 0 {
                continue;
            }
            let rate = q.monomial(t) / newly as f64;
            let better = match best {
                None => true,
                Some((r, bt, _)) => rate < r || (rate == r && t.sort_key() < bt.sort_key()),
            };
            if better {
                best = Some((rate, t, newly));
            }
        }
        let (_, t, _) = best.expect("some candidate always covers an uncovered member");
        picked.push(t);
        total += q.monomial(t);
        for (i, m) in members.iter().enumerate() {
            if uncovered[i] && t.is_subset_of(*m) {
                uncovered[i] = false;
                remaining -= 1;
            }
        }
    }

    // The member family and {∅} are always covers; never return worse.
    let member_cost = expected_hits(&minimal, q);
    let (cover_masks, cost) = if total <= member_cost.min(1.0) {
        (picked, total)
    } else if member_cost <= 1.0 {
        (members.to_vec(), member_cost)
    } else {
        (vec![SubsetMask::EMPTY], 1.0)
    };

    let cover = SetFamily::new(ground, cover_masks).unwrap();
    debug_assert!(is_valid_cover(h, &cover));
    CoverSolution { cover, cost, status: CoverStatus::UpperBound, nodes_explored: nodes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::GroundSet;

    fn family(n: usize, sets: &[&[usize]]) -> SetFamily {
        let sets: Vec<Vec<usize>> = sets.iter().map(|s| s.to_vec()).collect();
        SetFamily::from_index_sets(GroundSet::new(n).unwrap(), &sets).unwrap()
    }

    fn uniform(f: &SetFamily, q: f64) -> ProbVector {
        ProbVector::uniform(f.ground(), q).unwrap()
    }

    #[test]
    fn singleton_member() {
        let h = family(2, &[&[0]]);
        let q = ProbVector::new(h.ground(), vec![0.3, 0.5]).unwrap();
        let sol = exact_cost(&h, &q, &Caps::default()).unwrap();
        assert!((sol.cost - 0.3).abs() < COST_SLACK);
        assert_eq!(sol.cover.to_index_sets(), vec![vec![0]]);
        assert_eq!(sol.status, CoverStatus::ExactOptimal);
    }

    #[test]
    fn empty_set_member_forces_unit_cost() {
        let h = family(2, &[&[]]);
        let q = uniform(&h, 0.3);
        let sol = exact_cost(&h, &q, &Caps::default()).unwrap();
        assert_eq!(sol.cost, 1.0);
        assert_eq!(sol.cover.to_index_sets(), vec![Vec::<usize>::new()]);
        let (small, _) = is_q_small(&h, &q, &Caps::default()).unwrap();
        assert!(!small);
    }

    #[test]
    fn empty_family_costs_nothing() {
        let h = family(2, &[]);
        let q = uniform(&h, 0.3);
        let sol = exact_cost(&h, &q, &Caps::default()).unwrap();
        assert_eq!(sol.cost, 0.0);
        assert!(sol.cover.is_empty());
    }

    #[test]
    fn triangle_family_optimum_is_itself() {
        // All 2-subsets of {0,1,2} at q = 0.3: the family itself costs
        // 3·0.09 = 0.27, beating {{0},{1,2}} at 0.39 and {{0},{1}} at 0.60.
        let h = family(3, &[&[0, 1], &[0, 2], &[1, 2]]);
        let q = uniform(&h, 0.3);
        let sol = exact_cost(&h, &q, &Caps::default()).unwrap();
        assert!((sol.cost - 0.27).abs() < COST_SLACK);
        assert_eq!(sol.cover, h);
    }

    #[test]
    fn full_set_high_q() {
        let h = family(3, &[&[0, 1, 2]]);
        let q = uniform(&h, 0.9);
        let (small, sol) = is_q_small(&h, &q, &Caps::default()).unwrap();
        assert!((sol.cost - 0.729).abs() < COST_SLACK);
        assert!(!small);
    }

    #[test]
    fn high_q_prefers_empty_set_cover() {
        // Two disjoint singleton members at q = 0.9 cost 1.8 as-is; {∅}
        // covers everything at cost 1.
        let h = family(2, &[&[0], &[1]]);
        let q = uniform(&h, 0.9);
        let sol = exact_cost(&h, &q, &Caps::default()).unwrap();
        assert_eq!(sol.cost, 1.0);
        assert_eq!(sol.cover.to_index_sets(), vec![Vec::<usize>::new()]);
    }

    #[test]
    fn greedy_is_an_upper_bound_and_valid() {
        let h = family(4, &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]]);
        let q = uniform(&h, 0.4);
        let greedy = greedy_cost(&h, &q);
        let exact = exact_cost(&h, &q, &Caps::default()).unwrap();
        assert!(greedy.cost >= exact.cost - COST_SLACK);
        assert!(is_valid_cover(&h, &greedy.cover));
        assert_eq!(greedy.status, CoverStatus::UpperBound);

        let single = family(1, &[&[0]]);
        let q = ProbVector::uniform(single.ground(), 0.3).unwrap();
        assert!((greedy_cost(&single, &q).cost - 0.3).abs() < COST_SLACK);

        let empty = family(1, &[]);
        assert_eq!(greedy_cost(&empty, &q).cost, 0.0);
    }

    #[test]
    fn rational_mode_matches_float_on_small_instance() {
        let h = family(3, &[&[0, 1], &[0, 2], &[1, 2]]);
        let q_float = uniform(&h, 0.3);
        let q_rat: Vec<Rational> = vec![Rational::new(3.into(), 10.into()); 3];
        let float_sol = exact_cost(&h, &q_float, &Caps::default()).unwrap();
        let rat_sol = exact_cost_rational(&h, &q_rat, &Caps::default()).unwrap();
        assert_eq!(rat_sol.cost, Rational::new(27.into(), 100.into()));
        assert!((float_sol.cost - 0.27).abs() < COST_SLACK);
        assert_eq!(rat_sol.cover, float_sol.cover);
    }

    #[test]
    fn branch_and_bound_agrees_with_dp() {
        let h = family(6, &[&[0, 1], &[1, 2], &[2, 3], &[3, 4], &[4, 5], &[0, 5], &[1, 4]]);
        let q = uniform(&h, 0.35);
        let dp = exact_cost(&h, &q, &Caps::default()).unwrap();
        let forced_bnb = Caps { dp_members: 0, ..Caps::default() };
        let bnb = exact_cost(&h, &q, &forced_bnb).unwrap();
        assert!((dp.cost - bnb.cost).abs() < COST_SLACK);
        assert!(is_valid_cover(&h, &bnb.cover));
    }

    #[test]
    fn member_cap_is_enforced() {
        let h = family(3, &[&[0], &[1], &[2]]);
        let q = uniform(&h, 0.2);
        let caps = Caps { dp_members: 0, bnb_members: 2, ..Caps::default() };
        assert!(matches!(exact_cost(&h, &q, &caps), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn non_minimal_members_do_not_change_cost() {
        let h = family(4, &[&[0], &[0, 1], &[0, 1, 2]]);
        let q = uniform(&h, 0.3);
        let sol = exact_cost(&h, &q, &Caps::default()).unwrap();
        assert!((sol.cost - 0.3).abs() < COST_SLACK);
    }
}
