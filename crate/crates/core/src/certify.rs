//! Exact-rational certification of the numeric series bounds.
//!
//! Everything here is integer arithmetic. Irrational constants enter only
//! as one-sided rational bounds in the safe direction: a lower bound on `e`
//! (the first term is an upper bound), a lower bound on `π` and an upper
//! bound on `√2` (both appear in tail estimates that must not shrink). The
//! verdict compares the certified upper bound against 1/2 exactly, so a
//! `below-half` answer is a proof, never a float approximation.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fragment::Schedule;
use crate::Rational;

/// Lower bound on e = 2.718281828459…
fn e_lower() -> Rational {
    Rational::new(2_718_281_828u64.into(), 1_000_000_000u64.into())
}

/// Lower bound on π = 3.141592653589…
fn pi_lower() -> Rational {
    Rational::new(3_141_592_653u64.into(), 1_000_000_000u64.into())
}

/// Upper bound on √2 = 1.414213562373…
fn sqrt2_upper() -> Rational {
    Rational::new(1_414_213_563u64.into(), 1_000_000_000u64.into())
}

fn half() -> Rational {
    Rational::new(1.into(), 2.into())
}

fn ratio(n: u64, d: u64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Exponents above this are clamped when raising a ratio ≤ 1 to a huge
/// power; the clamped value is still an upper bound and already far below
/// any tolerance that matters.
const POW_EXP_CAP: u64 = 1 << 12;

/// Exact binomial coefficient.
pub fn binom_big(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for t in 0..k {
        acc = acc * (n - t) / (t + 1);
    }
    acc
}

/// `Σ_{j=m}^{ℓ} binom(ℓ,j) / L^j` as one reduced rational.
///
/// With `L = a/b` the sum is `Σ binom(ℓ,j) b^j a^{ℓ−j} / a^ℓ`; terms are
/// maintained incrementally so every step multiplies and divides by machine
/// words only.
pub fn binom_tail_weight(ell: u64, m: u64, l: &Rational) -> Result<Rational> {
    check_l_at_least_one(l)?;
    if m > ell {
        return Ok(Rational::zero());
    }
    let a = l.numer().to_biguint().expect("L >= 1 is positive");
    let b = l.denom().to_biguint().expect("denominators are positive");

    // First term: binom(ell, m) · b^m · a^(ell−m).
    let mut term = binom_big(ell, m) * b.pow(m as u32) * a.pow((ell - m) as u32);
    let mut numerator = term.clone();
    for j in m..ell {
        // term_{j+1} = term_j · (ell−j) · b / ((j+1) · a)
        term = term * (ell - j) * &b / (j + 1) / &a;
        numerator += &term;
    }
    Ok(Rational::new(
        BigInt::from(numerator),
        BigInt::from(a.pow(ell as u32)),
    ))
}

fn check_l_at_least_one(l: &Rational) -> Result<()> {
    if l < &Rational::one() {
        return Err(Error::InvalidArgument(format!("L = {l} violates L >= 1")));
    }
    Ok(())
}

/// Rational lower bound on `√x` for positive `x`, via integer square root
/// at `digits` decimal places.
fn sqrt_lower(x: &Rational, digits: u32) -> Rational {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = (x * Rational::from_integer(&scale * &scale)).to_integer();
    let root = scaled.to_biguint().expect("x is positive").sqrt();
    Rational::new(BigInt::from(root), scale)
}

fn pow_exact(r: &Rational, e: u32) -> Rational {
    Rational::new(r.numer().pow(e), r.denom().pow(e))
}

/// `ρ^min(exp, cap)`; sound as an upper bound whenever `ρ ≤ 1`.
fn pow_capped(rho: &Rational, exp: u64) -> Rational {
    pow_exact(rho, exp.min(POW_EXP_CAP) as u32)
}

/// Certified upper bound on one inner block `Σ_{j=m}^{2m−1} binom(2m−1,j)/L^j`
/// with `m = 2^{i−1}`, via the central-binomial estimate
/// `binom(2m−1,m) < 2^{2m−1}/√(πm)` and geometric summation. Requires L ≥ 4.
fn block_upper_bound(i: u32, l: &Rational) -> Result<Rational> {
    let four = Rational::from_integer(4.into());
    if *l < four {
        return Err(Error::TailUnavailable(format!(
            "central-binomial block bound needs L >= 4, got {l}"
        )));
    }
    let m: u64 = 1 << (i - 1);
    // (1/2) · (4/L)^m / (√(πm) · (1 − 1/L))
    let rho = four / l;
    let geom = Rational::one() - Rational::one() / l;
    let sqrt_pi_m = sqrt_lower(&(pi_lower() * Rational::from_integer(m.into())), 12);
    Ok(half() * pow_capped(&rho, m) / (sqrt_pi_m * geom))
}

/// Certified rational upper bound on the whole tail `Σ_{i ≥ i_start}` of
/// inner blocks at constant exponent `L ≥ 4`.
///
/// Block `i` is at most `(1/2)(4/L)^{2^{i−1}} / (√(π 2^{i−1})(1−1/L))`;
/// `(4/L)^m` only shrinks with `i` and `√(π m)` grows by exactly `√2` per
/// step, so the sum telescopes into the first block times `Σ 2^{−t/2} = 2+√2`.
pub fn tail_bound(i_start: u32, l: &Rational) -> Result<Rational> {
    if !(1..=62).contains(&i_start) {
        return Err(Error::InvalidArgument("tail start index must lie in 1..=62".into()));
    }
    let four = Rational::from_integer(4.into());
    if *l < four {
        return Err(Error::TailUnavailable(format!(
            "the geometric tail argument needs L >= 4, got {l}; extend i_max instead"
        )));
    }
    let m0: u64 = 1 << (i_start - 1);
    let rho = four / l;
    let geom = Rational::one() - Rational::one() / l;
    let sqrt_pi_m0 = sqrt_lower(&(pi_lower() * Rational::from_integer(m0.into())), 12);
    let step_sum = Rational::from_integer(2.into()) + sqrt2_upper();
    Ok(half() * pow_capped(&rho, m0) * step_sum / (sqrt_pi_m0 * geom))
}

/// How one reported term was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TermKind {
    /// Exact rational value.
    Exact,
    /// Certified upper bound (central-binomial estimate).
    UpperBound,
}

/// One certified term of the series.
#[derive(Debug, Clone, Serialize)]
pub struct TermDetail {
    /// Block index; 1 denotes the `2/(eL_1)` first term.
    pub i: u32,
    pub exponent: String,
    pub kind: TermKind,
    pub value: String,
    pub approx: f64,
    pub running_total: String,
    pub running_approx: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    BelowHalf,
    NotBelowHalf,
}

/// The certified evaluation of the series bound
/// `2/(eL_1) + Σ_{i≥2} Σ_{j=2^{i−1}}^{2^i−1} binom(2^i−1,j)/L_i^j`.
#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub schedule: String,
    pub i_max: u32,
    pub exact_limit: u32,
    pub terms: Vec<TermDetail>,
    pub partial_sum: String,
    pub partial_sum_approx: f64,
    /// Tail bound for blocks past `i_max`; absent when the partial sum
    /// alone already settled the verdict.
    pub tail_bound: Option<String>,
    pub tail_start: u32,
    pub total_upper: String,
    pub total_upper_approx: f64,
    /// Exact value behind `total_upper`.
    #[serde(skip)]
    pub total_upper_exact: Rational,
    pub verdict: Verdict,
    /// True when the verdict rests on the partial sum alone (the partial
    /// sum is an exact lower bound, so `not-below-half` stays sound even
    /// without a tail bound).
    pub partial_only: bool,
    /// Directions of the irrational-constant bounds baked into the result.
    pub bound_directions: Vec<String>,
}

fn approx(x: &Rational) -> f64 {
    x.to_f64().unwrap_or(f64::INFINITY)
}

/// Certify the series for a schedule, truncating at `i_max`.
///
/// Blocks up to `exact_limit` are computed exactly; later blocks and the
/// tail use certified upper bounds, so `total_upper` is always a valid
/// upper bound and `below-half` verdicts are sound. A partial sum that
/// already reaches 1/2 settles `not-below-half` on its own, since dropped
/// terms are nonnegative.
pub fn series_rhs(schedule: &Schedule, i_max: u32, exact_limit: u32) -> Result<CertificateReport> {
    if !(2..=60).contains(&i_max) {
        return Err(Error::InvalidArgument("i_max must lie in 2..=60".into()));
    }
    if exact_limit > 16 {
        return Err(Error::InvalidArgument(
            "exact blocks past i = 16 are infeasible; lower exact_limit".into(),
        ));
    }

    let mut terms = Vec::new();
    let mut partial = Rational::zero();
    let half = half();

    let l1 = schedule.value(1);
    check_l_at_least_one(&l1)?;
    let first = ratio(2, 1) / (e_lower() * &l1);
    partial += &first;
    terms.push(TermDetail {
        i: 1,
        exponent: l1.to_string(),
        kind: TermKind::UpperBound,
        value: first.to_string(),
        approx: approx(&first),
        running_total: partial.to_string(),
        running_approx: approx(&partial),
    });

    let mut partial_only = false;
    let mut truncated_at = None;
    for i in 2..=i_max {
        let l = schedule.value(i as usize);
        check_l_at_least_one(&l)?;
        let (value, kind) = if i <= exact_limit {
            (binom_tail_weight((1u64 << i) - 1, 1u64 << (i - 1), &l)?, TermKind::Exact)
        } else {
            match block_upper_bound(i, &l) {
                Ok(v) => (v, TermKind::UpperBound),
                Err(Error::TailUnavailable(msg)) => {
                    if partial >= half {
                        // Sound: the partial sum is exact from below.
                        partial_only = true;
                        truncated_at = Some(i);
                        break;
                    }
                    return Err(Error::TailUnavailable(msg));
                }
                Err(e) => return Err(e),
            }
        };
        partial += &value;
        terms.push(TermDetail {
            i,
            exponent: l.to_string(),
            kind,
            value: value.to_string(),
            approx: approx(&value),
            running_total: partial.to_string(),
            running_approx: approx(&partial),
        });
    }

    let tail_start = truncated_at.unwrap_or(i_max + 1);
    let tail = if partial_only {
        None
    } else {
        match tail_bound(tail_start, &schedule.min_from(tail_start as usize)) {
            Ok(t) => Some(t),
            Err(Error::TailUnavailable(msg)) => {
                if partial >= half {
                    partial_only = true;
                    None
                } else {
                    return Err(Error::TailUnavailable(msg));
                }
            }
            Err(e) => return Err(e),
        }
    };

    let total_upper = match &tail {
        Some(t) => &partial + t,
        None => partial.clone(),
    };
    let verdict = if total_upper < half { Verdict::BelowHalf } else { Verdict::NotBelowHalf };
    Ok(CertificateReport {
        schedule: schedule.describe(),
        i_max,
        exact_limit,
        terms,
        partial_sum: partial.to_string(),
        partial_sum_approx: approx(&partial),
        tail_bound: tail.as_ref().map(|t| t.to_string()),
        tail_start,
        total_upper: total_upper.to_string(),
        total_upper_approx: approx(&total_upper),
        total_upper_exact: total_upper,
        verdict,
        partial_only,
        bound_directions: vec![
            "e >= 2718281828/10^9 (first term is an upper bound)".into(),
            "pi >= 3141592653/10^9 (tail denominators shrink safely)".into(),
            "sqrt(2) <= 1414213563/10^9 (tail geometric factor grows safely)".into(),
        ],
    })
}

/// The exact certified total for a schedule; convenience over `series_rhs`.
pub fn series_total_upper(schedule: &Schedule, i_max: u32, exact_limit: u32) -> Result<Rational> {
    Ok(series_rhs(schedule, i_max, exact_limit)?.total_upper_exact)
}

/// The constant-exponent closed form at L = 6.
#[derive(Debug, Clone, Serialize)]
pub struct ClosedFormReport {
    /// Coefficients of L^{-1}..L^{-4} recomputed from binomials.
    pub coefficients: Vec<u64>,
    pub value: String,
    pub value_approx: f64,
    pub equals_23_48: bool,
    pub below_half: bool,
}

/// Evaluate `1/L + 3/L² + 1/L³ + 35/L⁴ + (4/L)⁵/(2(1−4/L))` at `L = 6`.
///
/// The coefficient of `L^{−j}` is `binom(2^{i(j)}−1, j)` where block `i(j)`
/// is the unique one containing `j`; for `j ≥ 5` the terms are replaced by
/// the geometric majorant `2^{2j−1}/L^j`, which sums in closed form.
pub fn closed_form_l6() -> ClosedFormReport {
    let l = Rational::from_integer(6.into());

    let coefficients: Vec<u64> = (1u64..=4)
        .map(|j| {
            let i = block_of(j);
            binom_big((1 << i) - 1, j).to_u64().expect("small binomial")
        })
        .collect();

    let mut value = Rational::zero();
    for (j, &c) in coefficients.iter().enumerate() {
        value += Rational::from_integer(c.into()) / pow_exact(&l, (j + 1) as u32);
    }
    // Σ_{j≥5} 2^{2j−1}/L^j = (4/L)^5 / (2(1 − 4/L)).
    let four_over_l = Rational::from_integer(4.into()) / &l;
    let geometric = pow_exact(&four_over_l, 5)
        / (Rational::from_integer(2.into()) * (Rational::one() - four_over_l));
    value += geometric;

    let target = Rational::new(23.into(), 48.into());
    ClosedFormReport {
        coefficients,
        value: value.to_string(),
        value_approx: approx(&value),
        equals_23_48: value == target,
        below_half: value < half(),
    }
}

/// The unique block index `i` with `2^{i−1} ≤ j ≤ 2^i − 1`.
pub fn block_of(j: u64) -> u32 {
    assert!(j >= 1);
    j.ilog2() + 1
}

/// `binom(2^i−1, j) ≤ 2^{2j−1}` for every j in block i — the majorant the
/// closed form rests on.
pub fn geometric_majorant_holds(j: u64) -> bool {
    let i = block_of(j);
    binom_big((1 << i) - 1, j) <= BigUint::from(2u32).pow((2 * j - 1) as u32)
}
