use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// An exact real literal.
///
/// Decimal source text is converted without rounding, so `0.1` is exactly one
/// tenth. Values with a terminating decimal expansion print as decimals, the
/// rest print as `p/q`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Real(pub BigRational);

impl Real {
    pub fn zero() -> Self {
        Real(BigRational::zero())
    }

    pub fn one() -> Self {
        Real(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Real(BigRational::from_integer(BigInt::from(n)))
    }

    /// Exact conversion of a finite float (every finite f64 is a dyadic rational).
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Real)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn neg(&self) -> Self {
        Real(-self.0.clone())
    }

    /// Decimal digits if the denominator is of the form 2^a 5^b.
    fn decimal_string(&self) -> Option<String> {
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        let mut den = self.0.denom().clone();
        let (mut twos, mut fives) = (0u32, 0u32);
        while (&den % &two).is_zero() {
            den /= &two;
            twos += 1;
        }
        while (&den % &five).is_zero() {
            den /= &five;
            fives += 1;
        }
        if !den.is_one() {
            return None;
        }
        let scale = twos.max(fives);
        let scaled = &self.0 * BigRational::from_integer(BigInt::from(10).pow(scale));
        debug_assert!(scaled.is_integer());
        let digits = scaled.to_integer().abs().to_string();
        let sign = if self.0.is_negative() { "-" } else { "" };
        if scale == 0 {
            return Some(format!("{sign}{digits}"));
        }
        let scale = scale as usize;
        let padded = if digits.len() <= scale {
            format!("{}{}", "0".repeat(scale - digits.len() + 1), digits)
        } else {
            digits
        };
        let (int, frac) = padded.split_at(padded.len() - scale);
        let frac = frac.trim_end_matches('0');
        if frac.is_empty() {
            Some(format!("{sign}{int}"))
        } else {
            Some(format!("{sign}{int}.{frac}"))
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.decimal_string() {
            Some(s) => f.write_str(&s),
            None => write!(f, "{}/{}", self.0.numer(), self.0.denom()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed number literal `{0}`")]
pub struct RealParseError(pub String);

fn parse_decimal(text: &str) -> Option<BigRational> {
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa),
    };
    let (int, frac) = match mantissa.split_once('.') {
        Some((i, f)) => (i, f),
        None => (mantissa, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let mut value = BigRational::new(digits, BigInt::from(10).pow(frac.len() as u32));
    if exp != 0 {
        let factor = BigRational::from_integer(BigInt::from(10).pow(exp.unsigned_abs()));
        if exp > 0 {
            value *= factor;
        } else {
            value /= factor;
        }
    }
    Some(if neg { -value } else { value })
}

impl FromStr for Real {
    type Err = RealParseError;

    /// Accepts `12`, `-0.25`, `1e-6` and the rational form `1/3`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || RealParseError(s.to_string());
        if let Some((n, d)) = s.split_once('/') {
            let n = parse_decimal(n).ok_or_else(err)?;
            let d = parse_decimal(d).ok_or_else(err)?;
            if d.is_zero() {
                return Err(err());
            }
            return Ok(Real(n / d));
        }
        parse_decimal(s).map(Real).ok_or_else(err)
    }
}
