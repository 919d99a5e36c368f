//! Exact rational linear algebra.
//!
//! Everything here works over [`Rat`] (arbitrary precision rationals) or
//! [`BigInt`]; nothing touches floating point.

mod hnf;
mod ldl;
mod lll;
mod mat;
mod poly;
mod span;

pub use hnf::{hnf, hnf_columns, same_column_lattice};
pub use ldl::{ldl, LdlFactor};
pub use lll::{lll_gram, lll_reduce, DEFAULT_DELTA};
pub use mat::Mat;
pub use poly::{char_poly, eigenvalue_lower_bound, Poly, SturmChain};
pub use span::Span;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rat = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rat {
    Rat::from_integer(BigInt::from(value))
}

/// Parses `"17"`, `"-3"` or `"a/b"`.
pub fn parse_rat(text: &str) -> Option<Rat> {
    let text = text.trim();
    let parse_int = |s: &str| -> Option<BigInt> {
        let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        s.parse().ok()
    };
    match text.split_once('/') {
        None => parse_int(text).map(Rat::from_integer),
        Some((n, d)) => {
            let n = parse_int(n)?;
            let d = parse_int(d)?;
            (!d.is_zero()).then(|| Rat::new(n, d))
        }
    }
}

pub(crate) fn to_integer(value: &Rat) -> Option<BigInt> {
    value.is_integer().then(|| value.numer().clone())
}

pub(crate) fn to_i64(value: &Rat) -> Option<i64> {
    to_integer(value).and_then(|v| v.to_i64())
}

/// Floor of a rational as a big integer.
pub(crate) fn floor(value: &Rat) -> BigInt {
    value.floor().to_integer()
}

/// Nearest integer, halves rounded towards +infinity.
pub(crate) fn round_half_up(value: &Rat) -> BigInt {
    floor(&(value + rat(1, 2)))
}

pub(crate) fn lcm_of_denominators<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

/// Greatest common divisor of rationals: the positive generator of the
/// additive group they span. Zero when every input is zero.
pub(crate) fn gcd_of_rats<'a>(values: impl IntoIterator<Item = &'a Rat>) -> Rat {
    let values: Vec<&Rat> = values.into_iter().collect();
    let den = lcm_of_denominators(values.iter().copied());
    let g = values
        .iter()
        .map(|v| (*v * Rat::from_integer(den.clone())).to_integer())
        .fold(BigInt::zero(), |acc, v| acc.gcd(&v));
    Rat::new(g, den)
}

pub(crate) fn check_positive(value: &Rat, what: &str) -> Result<()> {
    if value.is_positive() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{what} must be positive, got {value}"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_integers_and_fractions() {
        assert_eq!(parse_rat("17"), Some(int(17)));
        assert_eq!(parse_rat("-3"), Some(int(-3)));
        assert_eq!(parse_rat("+4"), Some(int(4)));
        assert_eq!(parse_rat("6/4"), Some(rat(3, 2)));
        assert_eq!(parse_rat("-1/3"), Some(rat(-1, 3)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(parse_rat("1.5"), None);
        assert_eq!(parse_rat("x"), None);
        assert_eq!(parse_rat(""), None);
    }

    #[test]
    fn rational_gcd() {
        assert_eq!(gcd_of_rats(&[int(14), int(12), int(6)]), int(2));
        assert_eq!(gcd_of_rats(&[rat(1, 2), rat(1, 3)]), rat(1, 6));
        assert_eq!(gcd_of_rats(&[int(0)]), int(0));
    }

    #[test]
    fn rounding() {
        assert_eq!(round_half_up(&rat(1, 2)), BigInt::from(1));
        assert_eq!(round_half_up(&rat(-1, 2)), BigInt::from(0));
        assert_eq!(round_half_up(&rat(-7, 5)), BigInt::from(-1));
        assert_eq!(floor(&rat(-1, 3)), BigInt::from(-1));
    }
}
