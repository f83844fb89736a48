//! Probability and expectation thresholds for uniform sampling
//! probabilities, located by bisection, plus the gap report comparing them.
//!
//! Both defining maps — `p ↦ Pr[X_p ∈ ⟨F⟩]` and `q ↦ c_q(F)` — are
//! continuous and nondecreasing on (0,1) for a non-trivial family, so the
//! predicate "value ≤ 1/2" holds on an initial segment and bisection
//! brackets its supremum. Results are always intervals: the sup definition
//! plus finite tolerance makes point answers misleading.

use serde::Serialize;

use crate::caps::Caps;
use crate::cover::exact_cost;
use crate::error::{Error, Result};
use crate::measure::{prob_upset_exact, prob_upset_mc, ProbVector};
use crate::sets::SetFamily;

/// Initial bracket endpoints; both maps provably cross 1/2 inside.
const BRACKET_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdMode {
    Exact,
    MonteCarlo,
}

/// Monte Carlo evaluation parameters for threshold bisection.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct McParams {
    pub trials: u64,
    pub seed: u64,
    pub confidence: f64,
}

/// A bracketing interval for a threshold.
#[derive(Debug, Clone, Serialize)]
pub struct ThresholdResult {
    pub lo: f64,
    pub hi: f64,
    pub mode: ThresholdMode,
    pub iterations: u32,
    /// Value of the inner map (probability resp. cost) at the last midpoint.
    pub midpoint_value: f64,
    /// Monte Carlo only: the estimate at the midpoint straddled 1/2, so the
    /// bracket refused to narrow further.
    pub unresolved: bool,
    /// Monte Carlo only: union-bound confidence that the bracket still
    /// contains the threshold after every sampled decision.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket_confidence: Option<f64>,
}

/// The Kahn–Kalai gap report for one family.
#[derive(Debug, Clone, Serialize)]
pub struct KkGapReport {
    pub ell: usize,
    pub pc_lo: f64,
    pub pc_hi: f64,
    pub qc_lo: f64,
    pub qc_hi: f64,
    /// Upper bound on p_c / q_c from the two intervals.
    pub ratio_bound: f64,
    pub kk_bound_log7ell: f64,
    pub kk_bound_4k7: f64,
    pub pass: bool,
}

fn check_non_trivial(family: &SetFamily) -> Result<SetFamily> {
    let minimal = family.minimal_elements();
    if minimal.is_empty() {
        return Err(Error::TrivialFamily("the empty family has no threshold"));
    }
    if minimal.contains_empty_set() {
        return Err(Error::TrivialFamily("⟨F⟩ = 2^X when ∅ ∈ F"));
    }
    Ok(minimal)
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidArgument(format!("tolerance {tol} must be in (0,1)")));
    }
    Ok(())
}

enum Decision {
    Holds(f64),
    Fails(f64),
    Unresolved(f64),
}

/// Shared bisection driver. `predicate` reports whether the inner value at a
/// point is still ≤ 1/2; the bracket invariant (holds at `lo`, fails at
/// `hi`) is checked at the endpoints and maintained throughout.
fn bisect(
    tol: f64,
    mode: ThresholdMode,
    per_step_confidence: Option<f64>,
    mut decide: impl FnMut(f64) -> Result<Decision>,
) -> Result<ThresholdResult> {
    let mut lo = BRACKET_EPS;
    let mut hi = 1.0 - BRACKET_EPS;
    match decide(lo)? {
        Decision::Holds(_) => {}
        _ => return Err(Error::TrivialFamily("predicate must hold at the lower bracket end")),
    }
    match decide(hi)? {
        Decision::Fails(_) => {}
        _ => return Err(Error::TrivialFamily("predicate must fail at the upper bracket end")),
    }

    let mut iterations = 0u32;
    let mut midpoint_value = f64::NAN;
    let mut unresolved = false;
    let mut decisions = 2u32;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        iterations += 1;
        decisions += 1;
        match decide(mid)? {
            Decision::Holds(v) => {
                midpoint_value = v;
                lo = mid;
            }
            Decision::Fails(v) => {
                midpoint_value = v;
                hi = mid;
            }
            Decision::Unresolved(v) => {
                midpoint_value = v;
                unresolved = true;
                break;
            }
        }
    }
    let bracket_confidence = per_step_confidence
        .map(|c| (1.0 - decisions as f64 * (1.0 - c)).max(0.0));
    Ok(ThresholdResult { lo, hi, mode, iterations, midpoint_value, unresolved, bracket_confidence })
}

/// Bracket `p_c = sup {p : Pr[X_p ∈ ⟨F⟩] ≤ 1/2}` for uniform `p`.
pub fn prob_threshold(
    family: &SetFamily,
    tol: f64,
    mc: Option<McParams>,
    caps: &Caps,
) -> Result<ThresholdResult> {
    check_tol(tol)?;
    let minimal = check_non_trivial(family)?;
    match mc {
        None => bisect(tol, ThresholdMode::Exact, None, |p| {
            let prob = prob_upset_exact(&minimal, &ProbVector::uniform(minimal.ground(), p)?, caps)?;
            Ok(if prob <= 0.5 { Decision::Holds(prob) } else { Decision::Fails(prob) })
        }),
        Some(params) => {
            // Each decision consumes a fresh substream block so repeated
            // evaluations stay independent.
            let mut block = 0u64;
            bisect(tol, ThresholdMode::MonteCarlo, Some(params.confidence), move |p| {
                let offset = block;
                block += 1;
                let est = prob_upset_mc(
                    &minimal,
                    &ProbVector::uniform(minimal.ground(), p)?,
                    params.trials,
                    params.seed.wrapping_add(offset),
                    params.confidence,
                )?;
                Ok(if est.hi <= 0.5 {
                    Decision::Holds(est.point)
                } else if est.lo > 0.5 {
                    Decision::Fails(est.point)
                } else {
                    Decision::Unresolved(est.point)
                })
            })
        }
    }
}

/// Bracket `q_c = sup {q : c_q(F) ≤ 1/2}` for uniform `q` (exact covers
/// only).
pub fn expectation_threshold(family: &SetFamily, tol: f64, caps: &Caps) -> Result<ThresholdResult> {
    check_tol(tol)?;
    let minimal = check_non_trivial(family)?;
    bisect(tol, ThresholdMode::Exact, None, |q| {
        let sol = exact_cost(&minimal, &ProbVector::uniform(minimal.ground(), q)?, caps)?;
        Ok(if sol.cost <= 0.5 { Decision::Holds(sol.cost) } else { Decision::Fails(sol.cost) })
    })
}

/// Compute both thresholds exactly and check the Kahn–Kalai gap bounds
/// `p_c ≤ 4 q_c log2(7ℓ)` and `p_c ≤ q_c (4 log2(2ℓ) + 7)`.
pub fn kk_gap_report(family: &SetFamily, tol: f64, caps: &Caps) -> Result<KkGapReport> {
    let minimal = check_non_trivial(family)?;
    let ell = minimal.bound_ell();
    let pc = prob_threshold(family, tol, None, caps)?;
    let qc = expectation_threshold(family, tol, caps)?;
    let ratio_bound = pc.hi / qc.lo;
    let ell_f = ell as f64;
    let kk_bound_log7ell = 4.0 * (7.0 * ell_f).log2();
    let kk_bound_4k7 = 4.0 * (2.0 * ell_f).log2() + 7.0;
    let pass = ratio_bound <= kk_bound_log7ell && ratio_bound <= kk_bound_4k7;
    Ok(KkGapReport {
        ell,
        pc_lo: pc.lo,
        pc_hi: pc.hi,
        qc_lo: qc.lo,
        qc_hi: qc.hi,
        ratio_bound,
        kk_bound_log7ell,
        kk_bound_4k7,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::GroundSet;

    fn family(n: usize, sets: &[&[usize]]) -> SetFamily {
        let sets: Vec<Vec<usize>> = sets.iter().map(|s| s.to_vec()).collect();
        SetFamily::from_index_sets(GroundSet::new(n).unwrap(), &sets).unwrap()
    }

    const TOL: f64 = 1e-6;

    #[test]
    fn single_singleton_threshold_is_half() {
        let f = family(1, &[&[0]]);
        let caps = Caps::default();
        let pc = prob_threshold(&f, TOL, None, &caps).unwrap();
        assert!(pc.lo <= 0.5 && 0.5 <= pc.hi + TOL);
        assert!(pc.hi - pc.lo <= TOL);
        let qc = expectation_threshold(&f, TOL, &caps).unwrap();
        assert!((qc.lo - 0.5).abs() <= TOL && (qc.hi - 0.5).abs() <= TOL);
    }

    #[test]
    fn full_set_family_matches_closed_form() {
        // F = ⟨{X}⟩ on 4 elements: both thresholds are 2^(-1/4).
        let f = family(4, &[&[0, 1, 2, 3]]);
        let caps = Caps::default();
        let expected = 2f64.powf(-0.25);
        let pc = prob_threshold(&f, TOL, None, &caps).unwrap();
        let qc = expectation_threshold(&f, TOL, &caps).unwrap();
        assert!((0.5 * (pc.lo + pc.hi) - expected).abs() < TOL);
        assert!((0.5 * (qc.lo + qc.hi) - expected).abs() < TOL);
    }

    #[test]
    fn two_subsets_thresholds() {
        // All 2-subsets of a 3-set: p_c = 1/2, q_c = sqrt(1/6).
        let f = family(3, &[&[0, 1], &[0, 2], &[1, 2]]);
        let caps = Caps::default();
        let pc = prob_threshold(&f, TOL, None, &caps).unwrap();
        assert!((0.5 * (pc.lo + pc.hi) - 0.5).abs() < TOL);
        let qc = expectation_threshold(&f, TOL, &caps).unwrap();
        let expected = (1.0f64 / 6.0).sqrt();
        assert!((0.5 * (qc.lo + qc.hi) - expected).abs() < TOL);
    }

    #[test]
    fn trivial_families_are_rejected() {
        let caps = Caps::default();
        let empty = family(2, &[]);
        assert!(matches!(prob_threshold(&empty, TOL, None, &caps), Err(Error::TrivialFamily(_))));
        let whole = family(2, &[&[]]);
        assert!(matches!(
            expectation_threshold(&whole, TOL, &caps),
            Err(Error::TrivialFamily(_))
        ));
    }

    #[test]
    fn mc_mode_brackets_singleton() {
        let f = family(1, &[&[0]]);
        let params = McParams { trials: 4_000, seed: 123, confidence: 0.99 };
        let res = prob_threshold(&f, 0.02, Some(params), &Caps::default()).unwrap();
        assert_eq!(res.mode, ThresholdMode::MonteCarlo);
        // Either it narrowed around 1/2 or it stopped honestly.
        assert!(res.lo <= 0.5 + 0.05 && res.hi >= 0.5 - 0.05);
        assert!(res.bracket_confidence.is_some());
    }

    #[test]
    fn thresholds_ignore_redundant_supersets() {
        let minimal = family(4, &[&[0, 1], &[2, 3]]);
        let padded = family(4, &[&[0, 1], &[2, 3], &[0, 1, 2], &[0, 1, 2, 3]]);
        let caps = Caps::default();
        let pc_min = prob_threshold(&minimal, TOL, None, &caps).unwrap();
        let pc_pad = prob_threshold(&padded, TOL, None, &caps).unwrap();
        assert_eq!(pc_min.lo, pc_pad.lo);
        assert_eq!(pc_min.hi, pc_pad.hi);
        let qc_min = expectation_threshold(&minimal, TOL, &caps).unwrap();
        let qc_pad = expectation_threshold(&padded, TOL, &caps).unwrap();
        assert_eq!(qc_min.lo, qc_pad.lo);
    }

    #[test]
    fn singleton_gap_report() {
        // ℓ = 1: ratio 1 against a bound of 4·log2(7) ≈ 11.23.
        let f = family(1, &[&[0]]);
        let report = kk_gap_report(&f, TOL, &Caps::default()).unwrap();
        assert_eq!(report.ell, 1);
        assert!((report.kk_bound_log7ell - 4.0 * 7f64.log2()).abs() < 1e-12);
        assert!((report.kk_bound_4k7 - 11.0).abs() < 1e-12);
        assert!((report.ratio_bound - 1.0).abs() < 1e-3);
        assert!(report.pass);
    }

    #[test]
    fn mc_mode_stops_unresolved_below_sampling_resolution() {
        // With 2000 trials the interval half-width is ≈ 0.036, so a 1e-9
        // tolerance is unreachable: the bisection must refuse to narrow
        // instead of picking sides on noise.
        let f = family(1, &[&[0]]);
        let params = McParams { trials: 2_000, seed: 4242, confidence: 0.99 };
        let res = prob_threshold(&f, 1e-9, Some(params), &Caps::default()).unwrap();
        assert!(res.unresolved);
        assert!(res.hi - res.lo > 1e-9);
        assert!(res.lo <= 0.5 + 0.1 && res.hi >= 0.5 - 0.1);
    }

    #[test]
    fn kk_report_passes_on_small_families() {
        let f = family(3, &[&[0, 1], &[0, 2], &[1, 2]]);
        let report = kk_gap_report(&f, 1e-5, &Caps::default()).unwrap();
        assert_eq!(report.ell, 2);
        assert!(report.pass, "ratio {} exceeds bounds", report.ratio_bound);
        assert!(report.ratio_bound >= 1.0 - 1e-3);
    }
}
