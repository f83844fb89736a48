//! Fragments, minimal fragments, the large/small split, amplification, the
//! k-round fragmentation process, and exact verification of the two cost
//! lemmas.

use std::collections::HashMap;

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::caps::Caps;
use crate::cover::{exact_cost, CoverSolution, COST_SLACK};
use crate::error::{Error, Result};
use crate::measure::{prob_upset_exact, sample, ProbVector};
use crate::rng::TrialRng;
use crate::sets::{SetFamily, SubsetMask};
use crate::Rational;

/// The sequence of amplification exponents `L_1, L_2, …` used across the
/// rounds of the process. Every entry is at least 1; values are rational so
/// the certifier can consume the same schedule exactly.
#[derive(Debug, Clone, PartialEq)]
pub enum Schedule {
    /// The default two-level schedule: 5 up to index 7, then 4.
    Paper,
    Constant(Rational),
    /// Explicit leading values; the last entry repeats forever.
    Custom(Vec<Rational>),
}

impl Schedule {
    pub fn constant(l: Rational) -> Result<Self> {
        Schedule::validated(Schedule::Constant(l))
    }

    pub fn custom(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("custom schedule needs at least one value".into()));
        }
        Schedule::validated(Schedule::Custom(values))
    }

    fn validated(schedule: Schedule) -> Result<Schedule> {
        let one = Rational::from_integer(1.into());
        let check = |index: usize, value: &Rational| -> Result<()> {
            if *value < one {
                return Err(Error::ScheduleValue { index, value: value.to_string() });
            }
            Ok(())
        };
        match &schedule {
            Schedule::Paper => {}
            Schedule::Constant(l) => check(1, l)?,
            Schedule::Custom(values) => {
                for (idx, v) in values.iter().enumerate() {
                    check(idx + 1, v)?;
                }
            }
        }
        Ok(schedule)
    }

    /// `L_i` for 1-based `i`.
    pub fn value(&self, i: usize) -> Rational {
        assert!(i >= 1, "schedule indices are 1-based");
        match self {
            Schedule::Paper => Rational::from_integer(if i <= 7 { 5.into() } else { 4.into() }),
            Schedule::Constant(l) => l.clone(),
            Schedule::Custom(values) => values[(i - 1).min(values.len() - 1)].clone(),
        }
    }

    pub fn value_f64(&self, i: usize) -> f64 {
        self.value(i).to_f64().expect("schedule values are finite")
    }

    /// Smallest `L_i` over all `i ≥ from` (schedules are eventually
    /// constant, so this is a finite minimum).
    pub fn min_from(&self, from: usize) -> Rational {
        match self {
            Schedule::Paper => Rational::from_integer(4.into()),
            Schedule::Constant(l) => l.clone(),
            Schedule::Custom(values) => values[(from - 1).min(values.len() - 1)..]
                .iter()
                .min()
                .cloned()
                .unwrap_or_else(|| values.last().unwrap().clone()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Schedule::Paper => "paper".into(),
            Schedule::Constant(l) => format!("const:{l}"),
            Schedule::Custom(values) => {
                let vals: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                format!("custom:{}", vals.join(","))
            }
        }
    }
}

/// `F(H,W) = {S \ W : S ∈ H}`, deduplicated.
pub fn fragments(h: &SetFamily, w: SubsetMask) -> SetFamily {
    SetFamily::new(h.ground().clone(), h.members().iter().map(|&s| s.minus(w)))
        .expect("fragments stay inside the ground set")
}

/// The inclusion-minimal fragments `F*(H,W)`. Equals `{∅}` exactly when
/// some member of `H` is contained in `W`.
pub fn minimal_fragments(h: &SetFamily, w: SubsetMask) -> SetFamily {
    fragments(h, w).minimal_elements()
}

/// Partition the minimal fragments into (size ≥ m, size < m).
pub fn split_large_small(h: &SetFamily, w: SubsetMask, m: usize) -> (SetFamily, SetFamily) {
    let fstar = minimal_fragments(h, w);
    let (large, small): (Vec<_>, Vec<_>) =
        fstar.members().iter().partition(|t| t.size() >= m);
    let ground = fstar.ground().clone();
    (
        SetFamily::new(ground.clone(), large).unwrap(),
        SetFamily::new(ground, small).unwrap(),
    )
}

/// Componentwise `1 − (1−q_x)^L`: the marginal of a union of `L`
/// independent samples. Computed via `expm1`/`ln_1p` and clamped so the
/// output provably stays in the open interval.
pub fn amplify(q: &ProbVector, l: f64) -> Result<ProbVector> {
    if l.is_nan() || l < 1.0 {
        return Err(Error::BadExponent(l));
    }
    const MAX_PROB: f64 = 1.0 - f64::EPSILON / 2.0;
    const MIN_PROB: f64 = 1e-300;
    let values = q
        .values()
        .iter()
        .map(|&qx| (-(l * (-qx).ln_1p()).exp_m1()).clamp(MIN_PROB, MAX_PROB))
        .collect();
    ProbVector::from_values(values)
}

/// One round of the process.
#[derive(Debug, Clone, Serialize)]
pub struct RoundRecord {
    /// Round number `i`, 1-based.
    pub round: usize,
    /// Size threshold `m_i = 2^(k−i)` for the large/small split.
    pub threshold_m: usize,
    /// Schedule index `k+1−i` the exponent was read from.
    pub schedule_index: usize,
    /// The exponent `L_{k+1−i}` itself.
    pub exponent: f64,
    /// The sampled set `W_i`.
    pub revealed: SubsetMask,
    /// `|H_{i−1}|` and `|H_i|`.
    pub family_before: usize,
    pub family_after: usize,
    /// Largest member size of `H_i`; at most `2^(k−i) − 1` by construction.
    pub after_bound_ell: usize,
    pub large_count: usize,
    /// Exact q-cost of the round's large part, when requested and feasible.
    pub large_cost: Option<f64>,
}

/// Full record of one fragmentation run.
#[derive(Debug, Clone, Serialize)]
pub struct ProcessTrace {
    pub ell: usize,
    /// `k = ⌊log2(2ℓ)⌋`.
    pub rounds_planned: usize,
    pub rounds: Vec<RoundRecord>,
    /// `W = W_1 ∪ … ∪ W_k`.
    pub union_revealed: SubsetMask,
    /// `H_k = {∅}`.
    pub event_e: bool,
    /// `W ∈ ⟨H⟩`.
    pub member_hit: bool,
    /// `Z = Σ_i c_q(large part of round i)`, when every round's cost was
    /// computed.
    pub large_cost_sum: Option<f64>,
    pub costs_complete: bool,
}

/// Run the k-round process: round `i` samples `W_i ∼ μ_{amplify(q, L_{k+1−i})}`
/// and keeps the small part of the split at `m_i = 2^(k−i)`.
///
/// `H_0` is the minimal-element reduction of the input: fragments, covers,
/// and up-closure membership are all invariant under it, and `ℓ` read from
/// minimal members never inflates the round count. Each `W_i` is drawn
/// independently and fragments are taken against `W_i` alone; the cumulative
/// union is recorded separately.
pub fn run_process(
    h: &SetFamily,
    q: &ProbVector,
    schedule: &Schedule,
    rng: &mut TrialRng,
    compute_costs: bool,
    caps: &Caps,
) -> Result<ProcessTrace> {
    if h.is_empty() {
        return Err(Error::TrivialFamily("the process needs a nonempty family"));
    }
    if h.contains_empty_set() {
        return Err(Error::TrivialFamily("∅ ∈ H makes every W a hit"));
    }
    let minimal = h.minimal_elements();
    let ell = minimal.bound_ell();
    let k = (2 * ell).ilog2() as usize;

    let mut current = minimal;
    let mut rounds = Vec::with_capacity(k);
    let mut union = SubsetMask::EMPTY;
    let mut costs_complete = compute_costs;
    for i in 1..=k {
        let threshold_m = 1usize << (k - i);
        let schedule_index = k + 1 - i;
        let exponent = schedule.value_f64(schedule_index);
        let revealed = sample(&amplify(q, exponent)?, rng);
        let (large, small) = split_large_small(&current, revealed, threshold_m);
        let large_cost = if compute_costs {
            match exact_cost(&large, q, caps) {
                Ok(sol) => Some(sol.cost),
                Err(Error::CapExceeded { .. }) => {
                    costs_complete = false;
                    None
                }
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        rounds.push(RoundRecord {
            round: i,
            threshold_m,
            schedule_index,
            exponent,
            revealed,
            family_before: current.len(),
            family_after: small.len(),
            after_bound_ell: small.bound_ell(),
            large_count: large.len(),
            large_cost,
        });
        union = union.union(revealed);
        current = small;
    }

    let event_e = current.len() == 1 && current.contains_empty_set();
    let member_hit = h.contains_member(union);
    let large_cost_sum = costs_complete
        .then(|| rounds.iter().filter_map(|r| r.large_cost).sum::<f64>());
    Ok(ProcessTrace {
        ell,
        rounds_planned: k,
        rounds,
        union_revealed: union,
        event_e,
        member_hit,
        large_cost_sum,
        costs_complete,
    })
}

/// Outcome of one lemma verification.
#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub lhs: f64,
    pub rhs: f64,
    pub verdict: bool,
    /// Extra factors behind `rhs`, for the record.
    pub details: HashMap<&'static str, f64>,
}

/// Exact check of the cost lemma: with `p = amplify(q, L)`,
/// `E[c_q(L_m(H, X_p))] ≤ Pr[X_p ∈ ⟨H⟩] · Σ_{j=m}^{ℓ} binom(ℓ,j)/L^j`.
///
/// The left side is an exact expectation over all `2^n` outcomes; costs are
/// memoized by large-part family since many outcomes share fragments.
pub fn verify_lemma1(
    h: &SetFamily,
    q: &ProbVector,
    l: f64,
    m: usize,
    caps: &Caps,
) -> Result<LemmaReport> {
    if m < 1 {
        return Err(Error::InvalidArgument("lemma requires m >= 1".into()));
    }
    let n = h.ground().size();
    if n > caps.exact_prob_n {
        return Err(Error::CapExceeded {
            what: "ground set size for exact lemma verification",
            value: n,
            cap: caps.exact_prob_n,
            hint: "shrink the instance or raise the cap",
        });
    }
    let minimal = h.minimal_elements();
    let ell = minimal.bound_ell();
    let p = amplify(q, l)?;

    let mut memo: HashMap<Vec<u64>, f64> = HashMap::new();
    let mut lhs = 0.0;
    for outcome in 0..(1u64 << n) {
        let w = SubsetMask::from_bits(outcome);
        let (large, _) = split_large_small(&minimal, w, m);
        let key: Vec<u64> = large.members().iter().map(|t| t.bits()).collect();
        let cost = match memo.get(&key) {
            Some(&c) => c,
            None => {
                let c = exact_cost(&large, q, caps)?.cost;
                memo.insert(key, c);
                c
            }
        };
        lhs += p.outcome_probability(w) * cost;
    }

    let prob = prob_upset_exact(&minimal, &p, caps)?;
    let weight = binom_tail_weight_f64(ell, m, l);
    let rhs = prob * weight;
    let mut details = HashMap::new();
    details.insert("prob_upset", prob);
    details.insert("tail_weight", weight);
    details.insert("ell", ell as f64);
    Ok(LemmaReport { lhs, rhs, verdict: lhs <= rhs + COST_SLACK, details })
}

/// `Σ_{j=m}^{ℓ} binom(ℓ,j)/L^j` in floating point (ℓ ≤ 63, so the
/// binomials fit u128 exactly).
pub fn binom_tail_weight_f64(ell: usize, m: usize, l: f64) -> f64 {
    (m..=ell).map(|j| binom_exact(ell, j) as f64 / l.powi(j as i32)).sum()
}

fn binom_exact(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u128;
    for t in 0..k {
        acc = acc * (n - t) as u128 / (t + 1) as u128;
    }
    acc
}

/// Exact check of the 1-bounded special case: for `H = {{h_1},…,{h_r}}`,
/// `c_q(H) · Π_i (1−q_{h_i})^L ≤ 1/(eL)`.
///
/// The left side is the exact expectation: the large part equals `H` when
/// no `h_i` is sampled and is empty otherwise.
pub fn verify_lemma2(h: &SetFamily, q: &ProbVector, l: f64, caps: &Caps) -> Result<LemmaReport> {
    if l.is_nan() || l < 1.0 {
        return Err(Error::BadExponent(l));
    }
    if h.is_empty() || h.contains_empty_set() {
        return Err(Error::TrivialFamily("lemma needs a nonempty family without ∅"));
    }
    let ell = h.bound_ell();
    if ell != 1 {
        return Err(Error::NotOneBounded(ell));
    }
    let cost = exact_cost(h, q, caps)?.cost;
    let miss_prob: f64 = h
        .minimal_elements()
        .members()
        .iter()
        .map(|s| {
            let x = s.elements().next().expect("members are singletons");
            (1.0 - q.get(x)).powf(l)
        })
        .product();
    let lhs = cost * miss_prob;
    let rhs = 1.0 / (std::f64::consts::E * l);
    let mut details = HashMap::new();
    details.insert("cost", cost);
    details.insert("miss_prob", miss_prob);
    Ok(LemmaReport { lhs, rhs, verdict: lhs <= rhs + COST_SLACK, details })
}

/// The exact q-cost of the large part, exposed for per-round audits.
pub fn large_part_cost(
    h: &SetFamily,
    w: SubsetMask,
    m: usize,
    q: &ProbVector,
    caps: &Caps,
) -> Result<CoverSolution> {
    let (large, _) = split_large_small(h, w, m);
    exact_cost(&large, q, caps)
}
