//! Exact scalar arithmetic for structural sequences.
//!
//! The built-in families have closed-form weights like `1/(j+1)` or
//! `1/sqrt(k)`, so quantities derived from them (degree maxima, conductance
//! ratios, the growth sequence of the diagnostics) can be carried exactly as
//! rationals or square roots of rationals instead of floats.  [`ExactScalar`]
//! covers exactly that closure: it is stable under products, quotients, and
//! comparisons as long as at most one square root survives — which is all the
//! diagnostics need.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

/// Rational numbers over `i128`.
pub type Rat = Ratio<i128>;

/// Integer square root when exact.
fn perfect_sqrt(x: i128) -> Option<i128> {
    if x < 0 {
        return None;
    }
    let guess = (x as f64).sqrt().round() as i128;
    for s in guess.saturating_sub(2)..=guess + 2 {
        if s >= 0 && s.checked_mul(s) == Some(x) {
            return Some(s);
        }
    }
    None
}

/// A nonnegative-radicand exact scalar: either a rational or the square root
/// of a nonnegative rational.  Square roots of perfect squares collapse to
/// the rational form on construction, so equality is structural.
///
/// Serializes as its display string (`"3/2"`, `"sqrt(201)"`), which keeps
/// report files readable and round-trips exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ExactScalar {
    Rational(Rat),
    /// `sqrt(r)` for a nonnegative, non-perfect-square rational `r`.
    SqrtRational(Rat),
}

impl ExactScalar {
    pub fn integer(n: i128) -> Self {
        ExactScalar::Rational(Rat::from_integer(n))
    }

    /// `numer / denom`; panics if `denom == 0`.
    pub fn ratio(numer: i128, denom: i128) -> Self {
        ExactScalar::Rational(Rat::new(numer, denom))
    }

    /// `sqrt(numer / denom)`; panics on a negative radicand or zero
    /// denominator.  Collapses to `Rational` when the root is exact.
    pub fn sqrt_ratio(numer: i128, denom: i128) -> Self {
        Self::sqrt_of(Rat::new(numer, denom))
    }

    fn sqrt_of(r: Rat) -> Self {
        assert!(r >= Rat::from_integer(0), "negative radicand {r}");
        match (perfect_sqrt(*r.numer()), perfect_sqrt(*r.denom())) {
            (Some(n), Some(d)) => ExactScalar::Rational(Rat::new(n, d)),
            _ => ExactScalar::SqrtRational(r),
        }
    }

    pub fn zero() -> Self {
        Self::integer(0)
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ExactScalar::Rational(r) => *r.numer() == 0,
            ExactScalar::SqrtRational(r) => *r.numer() == 0,
        }
    }

    /// Exact product.  Mixed products require the rational factor to be
    /// nonnegative (all diagnostic quantities are).
    pub fn mul(self, other: ExactScalar) -> ExactScalar {
        use ExactScalar::*;
        match (self, other) {
            (Rational(a), Rational(b)) => Rational(a * b),
            (Rational(a), SqrtRational(b)) | (SqrtRational(b), Rational(a)) => {
                assert!(
                    a >= Rat::from_integer(0),
                    "product of a negative rational with a square root"
                );
                Self::sqrt_of(a * a * b)
            }
            (SqrtRational(a), SqrtRational(b)) => Self::sqrt_of(a * b),
        }
    }

    /// Exact quotient; panics on division by zero, and requires a
    /// nonnegative rational when mixing forms.
    pub fn div(self, other: ExactScalar) -> ExactScalar {
        use ExactScalar::*;
        assert!(!other.is_zero(), "division by zero");
        match (self, other) {
            (Rational(a), Rational(b)) => Rational(a / b),
            (Rational(a), SqrtRational(b)) => {
                assert!(a >= Rat::from_integer(0));
                Self::sqrt_of(a * a / b)
            }
            (SqrtRational(a), Rational(b)) => {
                assert!(b >= Rat::from_integer(0));
                Self::sqrt_of(a / (b * b))
            }
            (SqrtRational(a), SqrtRational(b)) => Self::sqrt_of(a / b),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExactScalar::Rational(r) => *r.numer() as f64 / *r.denom() as f64,
            ExactScalar::SqrtRational(r) => (*r.numer() as f64 / *r.denom() as f64).sqrt(),
        }
    }

    /// Exact comparison across both forms.
    pub fn compare(&self, other: &ExactScalar) -> Ordering {
        use ExactScalar::*;
        match (self, other) {
            (Rational(a), Rational(b)) => a.cmp(b),
            (SqrtRational(a), SqrtRational(b)) => a.cmp(b),
            (Rational(a), SqrtRational(b)) => {
                if *a.numer() < 0 {
                    Ordering::Less
                } else {
                    (*a * *a).cmp(b)
                }
            }
            (SqrtRational(_), Rational(_)) => other.compare(self).reverse(),
        }
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.compare(other))
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExactScalar::Rational(r) => {
                if *r.denom() == 1 {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            ExactScalar::SqrtRational(r) => {
                if *r.denom() == 1 {
                    write!(f, "sqrt({})", r.numer())
                } else {
                    write!(f, "sqrt({}/{})", r.numer(), r.denom())
                }
            }
        }
    }
}

impl From<ExactScalar> for String {
    fn from(value: ExactScalar) -> String {
        value.to_string()
    }
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    let parse = |part: &str| {
        part.trim()
            .parse::<i128>()
            .map_err(|e| format!("bad integer {part:?}: {e}"))
    };
    match s.split_once('/') {
        Some((numer, denom)) => {
            let denom = parse(denom)?;
            if denom == 0 {
                return Err("zero denominator".into());
            }
            Ok(Rat::new(parse(numer)?, denom))
        }
        None => Ok(Rat::from_integer(parse(s)?)),
    }
}

impl TryFrom<String> for ExactScalar {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        let s = s.trim();
        if let Some(inner) = s.strip_prefix("sqrt(").and_then(|r| r.strip_suffix(')')) {
            let r = parse_rat(inner)?;
            if r < Rat::from_integer(0) {
                return Err(format!("negative radicand in {s:?}"));
            }
            Ok(Self::sqrt_of(r))
        } else {
            Ok(ExactScalar::Rational(parse_rat(s)?))
        }
    }
}
