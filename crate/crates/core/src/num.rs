//! Rational helpers shared by the geometry and LP layers.

use num_bigint::{BigInt, Sign};
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `2^-bits` as an exact rational.
pub fn pow2_neg(bits: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << bits as usize)
}

/// Parses `"p/q"`, integers and decimal literals (`"-1.25e-3"`) exactly.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty number".into()));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad(text))?;
        let q: BigInt = q.trim().parse().map_err(|_| bad(text))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {text:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| bad(text))?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad(text));
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad(text));
    }
    let all: String = format!("{whole}{frac}");
    let mut num: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().map_err(|_| bad(text))? };
    if neg {
        num = -num;
    }
    let scale = exp - frac.len() as i64;
    let ten = BigInt::from(10u32);
    let value = if scale >= 0 {
        Rational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        Rational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(value)
}

fn bad(text: &str) -> Error {
    Error::Parse(format!("not a rational number: {text:?}"))
}

/// `p/q` in lowest terms, or just `p` for integers.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        if r.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// `floor(sqrt(r) * 2^bits) / 2^bits` for `r >= 0`.
pub fn sqrt_floor(r: &Rational, bits: u32) -> Rational {
    assert!(!r.is_negative(), "sqrt of a negative rational");
    let scaled = (r.numer() << (2 * bits as usize)) / r.denom();
    Rational::new(scaled.sqrt(), BigInt::one() << bits as usize)
}

/// Smallest integer `t` with `t^2 >= n`.
pub fn ceil_sqrt(n: u64) -> u64 {
    let r = n.sqrt();
    if r * r == n {
        r
    } else {
        r + 1
    }
}

/// Smallest integer `t` with `t^3 >= 27 n^2`, i.e. `ceil(3 n^(2/3))`.
pub fn ceil_three_n_two_thirds(n: u64) -> u64 {
    let target = 27u128 * (n as u128) * (n as u128);
    let mut t = (target as f64).cbrt().floor() as u128;
    while t * t * t < target {
        t += 1;
    }
    while t > 0 && (t - 1) * (t - 1) * (t - 1) >= target {
        t -= 1;
    }
    t as u64
}

/// Exact comparison `value >= sqrt(n) / 2`, i.e. `4 value^2 >= n` for nonnegative values.
pub fn at_least_half_sqrt(value: &Rational, n: u64) -> bool {
    if value.is_negative() {
        return n == 0;
    }
    let lhs = value * value * int(4);
    lhs >= Rational::from_integer(BigInt::from(n))
}

pub fn sign_of(v: &BigInt) -> i32 {
    match v.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

pub fn rational_sign(v: &Rational) -> i32 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_exactly() {
        assert_eq!(parse_rational("0.1").unwrap(), ratio(1, 10));
        assert_eq!(parse_rational("-1.25e-3").unwrap(), ratio(-1, 800));
        assert_eq!(parse_rational("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert_eq!(parse_rational("2E2").unwrap(), int(200));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn sqrt_floor_brackets_the_root() {
        let two = int(2);
        let s = sqrt_floor(&two, 60);
        let ulp = pow2_neg(60);
        assert!(&s * &s <= two);
        let hi = &s + &ulp;
        assert!(&hi * &hi > two);
        assert_eq!(sqrt_floor(&int(9), 60), int(3));
    }

    #[test]
    fn integer_roots() {
        assert_eq!(ceil_sqrt(9), 3);
        assert_eq!(ceil_sqrt(10), 4);
        assert_eq!(ceil_sqrt(49), 7);
        // 3 * 10^(2/3) = 13.92...
        assert_eq!(ceil_three_n_two_thirds(10), 14);
        // 3 * 15^(2/3) = 18.24...
        assert_eq!(ceil_three_n_two_thirds(15), 19);
        // 3 * 20^(2/3) = 22.10...
        assert_eq!(ceil_three_n_two_thirds(20), 23);
        assert_eq!(ceil_three_n_two_thirds(8), 12);
    }

    #[test]
    fn half_sqrt_comparison() {
        assert!(at_least_half_sqrt(&int(1), 4));
        assert!(!at_least_half_sqrt(&ratio(99, 100), 4));
        assert!(at_least_half_sqrt(&ratio(5, 2), 25));
        assert!(!at_least_half_sqrt(&ratio(249, 100), 25));
    }
}
