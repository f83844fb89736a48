//! Parsing of probability specs, exact rationals, and schedule descriptors.

use threshold_lab::fragment::Schedule;
use threshold_lab::{ProbVector, Rational, SetFamily};

use crate::{AppError, AppResult};

/// A probability spec: a uniform value ("0.35"), a comma list matching the
/// ground size, or None to fall back to the family file's own vector.
pub fn resolve_prob(
    spec: Option<&str>,
    file_q: Option<&ProbVector>,
    family: &SetFamily,
    what: &str,
) -> AppResult<ProbVector> {
    match spec {
        None => file_q.cloned().ok_or_else(|| {
            AppError::Validation(format!(
                "no --{what} given and the family file carries no \"q\" vector"
            ))
        }),
        Some(text) if text.contains(',') => {
            let values = text
                .split(',')
                .map(|v| parse_f64(v.trim(), what))
                .collect::<AppResult<Vec<f64>>>()?;
            Ok(ProbVector::new(family.ground(), values)?)
        }
        Some(text) => {
            let value = parse_f64(text.trim(), what)?;
            Ok(ProbVector::uniform(family.ground(), value)?)
        }
    }
}

fn parse_f64(text: &str, what: &str) -> AppResult<f64> {
    text.parse()
        .map_err(|_| AppError::Validation(format!("invalid {what} value {text:?}")))
}

/// Exact rational from "3/10", "0.3", or "4".
pub fn parse_rational(text: &str) -> AppResult<Rational> {
    let text = text.trim();
    let invalid = || AppError::Validation(format!("invalid rational {text:?}"));
    if let Some((numer, denom)) = text.split_once('/') {
        let n: i64 = numer.trim().parse().map_err(|_| invalid())?;
        let d: i64 = denom.trim().parse().map_err(|_| invalid())?;
        if d == 0 {
            return Err(invalid());
        }
        return Ok(Rational::new(n.into(), d.into()));
    }
    if let Some((whole, frac)) = text.split_once('.') {
        let whole: i64 = if whole.is_empty() { 0 } else { whole.parse().map_err(|_| invalid())? };
        if frac.is_empty() || frac.len() > 18 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(invalid());
        }
        let digits: i64 = frac.parse().map_err(|_| invalid())?;
        let scale = 10i64.pow(frac.len() as u32);
        let sign = if text.trim_start().starts_with('-') { -1 } else { 1 };
        return Ok(Rational::new(
            (whole * scale + sign * digits).into(),
            scale.into(),
        ));
    }
    let n: i64 = text.parse().map_err(|_| invalid())?;
    Ok(Rational::from_integer(n.into()))
}

/// Rational probability vector for certification-grade cover runs.
pub fn resolve_rational_probs(
    spec: Option<&str>,
    family: &SetFamily,
    what: &str,
) -> AppResult<Vec<Rational>> {
    let n = family.ground().size();
    let text = spec.ok_or_else(|| {
        AppError::Validation(format!("--rational needs an explicit --{what} value"))
    })?;
    if text.contains(',') {
        let values = text
            .split(',')
            .map(parse_rational)
            .collect::<AppResult<Vec<Rational>>>()?;
        if values.len() != n {
            return Err(AppError::Validation(format!(
                "expected {n} rational values, got {}",
                values.len()
            )));
        }
        Ok(values)
    } else {
        Ok(vec![parse_rational(text)?; n])
    }
}

/// Schedule descriptor: "paper", "const:L", or "custom:a,b,c" (last entry
/// repeats forever). L values may be decimals or fractions.
pub fn parse_schedule(text: &str) -> AppResult<Schedule> {
    let text = text.trim();
    if text == "paper" {
        return Ok(Schedule::Paper);
    }
    if let Some(value) = text.strip_prefix("const:") {
        return Ok(Schedule::constant(parse_rational(value)?)?);
    }
    if let Some(list) = text.strip_prefix("custom:") {
        let values = list
            .split(',')
            .map(parse_rational)
            .collect::<AppResult<Vec<Rational>>>()?;
        return Ok(Schedule::custom(values)?);
    }
    Err(AppError::Validation(format!(
        "unknown schedule {text:?}; expected \"paper\", \"const:L\", or \"custom:a,b,c\""
    )))
}

/// Comma-separated element indices ("" for the empty set).
pub fn parse_elements(text: &str) -> AppResult<Vec<usize>> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| AppError::Validation(format!("invalid element index {v:?}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_parse() {
        assert_eq!(parse_rational("4.5").unwrap(), Rational::new(9.into(), 2.into()));
        assert_eq!(parse_rational("9/2").unwrap(), Rational::new(9.into(), 2.into()));
        assert_eq!(parse_rational("4").unwrap(), Rational::from_integer(4.into()));
        assert_eq!(parse_rational("0.25").unwrap(), Rational::new(1.into(), 4.into()));
        assert!(parse_rational("x").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn schedules_parse() {
        assert_eq!(parse_schedule("paper").unwrap(), Schedule::Paper);
        assert_eq!(
            parse_schedule("const:4.5").unwrap(),
            Schedule::constant(Rational::new(9.into(), 2.into())).unwrap()
        );
        assert!(parse_schedule("const:0.5").is_err());
        assert!(parse_schedule("sometimes").is_err());
        let custom = parse_schedule("custom:5,5,4").unwrap();
        assert_eq!(custom.value_f64(9), 4.0);
    }

    #[test]
    fn elements_parse() {
        assert_eq!(parse_elements("").unwrap(), Vec::<usize>::new());
        assert_eq!(parse_elements("0, 2,5").unwrap(), vec![0, 2, 5]);
        assert!(parse_elements("0,x").is_err());
    }
}
