//! The product measure: sampling, exact up-closure probabilities, and
//! expected hit counts.

use rand::Rng;
use serde::Serialize;

use crate::caps::Caps;
use crate::error::{Error, Result};
use crate::rng::{trial_rng, TrialRng};
use crate::sets::{GroundSet, SetFamily, SubsetMask};

/// Per-element probabilities, each strictly inside (0,1).
///
/// Boundary values are rejected outright; callers wanting limit behavior
/// must perturb explicitly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbVector {
    values: Vec<f64>,
}

impl ProbVector {
    pub fn new(ground: &GroundSet, values: Vec<f64>) -> Result<Self> {
        if values.len() != ground.size() {
            return Err(Error::ProbLength { got: values.len(), want: ground.size() });
        }
        Self::from_values(values)
    }

    /// Build from raw values, checking only the open-interval invariant.
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        for &v in &values {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::ProbOutOfRange(v));
            }
        }
        Ok(ProbVector { values })
    }

    pub fn uniform(ground: &GroundSet, p: f64) -> Result<Self> {
        Self::new(ground, vec![p; ground.size()])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, element: usize) -> f64 {
        self.values[element]
    }

    /// Probability of drawing exactly `subset` under this product measure.
    pub fn outcome_probability(&self, subset: SubsetMask) -> f64 {
        let mut prob = 1.0;
        for (x, &q) in self.values.iter().enumerate() {
            prob *= if subset.contains(x) { q } else { 1.0 - q };
        }
        prob
    }

    /// Product of the entries over `subset` (the monomial `q^S`).
    pub fn monomial(&self, subset: SubsetMask) -> f64 {
        subset.elements().map(|x| self.values[x]).product()
    }
}

/// A Monte Carlo probability estimate with a distribution-free confidence
/// interval.
#[derive(Debug, Clone, Serialize)]
pub struct ProbEstimate {
    pub point: f64,
    pub lo: f64,
    pub hi: f64,
    pub trials: u64,
    pub seed: u64,
    pub confidence: f64,
}

/// Draw one set: each element included independently with its probability.
pub fn sample(q: &ProbVector, rng: &mut TrialRng) -> SubsetMask {
    let mut bits = 0u64;
    for (x, &p) in q.values().iter().enumerate() {
        if rng.random_bool(p) {
            bits |= 1 << x;
        }
    }
    SubsetMask::from_bits(bits)
}

/// Expected number of members contained in a sample: `e_q(F) = Σ_S q^S`.
pub fn expected_hits(family: &SetFamily, q: &ProbVector) -> f64 {
    family.members().iter().map(|&m| q.monomial(m)).sum()
}

/// Exact `Pr[X_p ∈ ⟨F⟩]` by full enumeration of the `2^n` outcomes.
///
/// Outcomes are summed in numeric order against the minimal members, so the
/// result is deterministic bit-for-bit.
pub fn prob_upset_exact(family: &SetFamily, p: &ProbVector, caps: &Caps) -> Result<f64> {
    let n = family.ground().size();
    if p.len() != n {
        return Err(Error::ProbLength { got: p.len(), want: n });
    }
    if n > caps.exact_prob_n {
        return Err(Error::CapExceeded {
            what: "ground set size for exact enumeration",
            value: n,
            cap: caps.exact_prob_n,
            hint: "use Monte Carlo mode or raise the cap",
        });
    }
    let minimal = family.minimal_elements();
    if minimal.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for outcome in 0..(1u64 << n) {
        let w = SubsetMask::from_bits(outcome);
        if minimal.contains_member(w) {
            total += p.outcome_probability(w);
        }
    }
    Ok(total)
}

/// Monte Carlo `Pr[X_p ∈ ⟨F⟩]` with a two-sided Hoeffding interval.
///
/// Trial `t` draws from substream `t` of `seed`, so estimates are
/// reproducible and independent of evaluation order.
pub fn prob_upset_mc(
    family: &SetFamily,
    p: &ProbVector,
    trials: u64,
    seed: u64,
    confidence: f64,
) -> Result<ProbEstimate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be >= 1".into()));
    }
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::ProbOutOfRange(confidence));
    }
    if p.len() != family.ground().size() {
        return Err(Error::ProbLength { got: p.len(), want: family.ground().size() });
    }
    let minimal = family.minimal_elements();
    let mut hits = 0u64;
    for t in 0..trials {
        let mut rng = trial_rng(seed, t);
        if minimal.contains_member(sample(p, &mut rng)) {
            hits += 1;
        }
    }
    let point = hits as f64 / trials as f64;
    let half_width = hoeffding_half_width(trials, confidence);
    Ok(ProbEstimate {
        point,
        lo: (point - half_width).max(0.0),
        hi: (point + half_width).min(1.0),
        trials,
        seed,
        confidence,
    })
}

/// Two-sided Hoeffding half-width: `Pr[|p̂ − p| ≥ t] ≤ 2 exp(−2 n t²)`.
pub fn hoeffding_half_width(trials: u64, confidence: f64) -> f64 {
    ((2.0 / (1.0 - confidence)).ln() / (2.0 * trials as f64)).sqrt()
}
