//! Exact arithmetic helpers: rational floors/ceilings, integer logs, and
//! ceilings of fractional powers computed without floating point.

use num::bigint::BigInt;
use num::{BigRational, One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// Serializable exact rational. The `approx` field is informational only;
/// `num`/`den` are authoritative.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RationalRepr {
    pub num: String,
    pub den: String,
    pub approx: f64,
}

impl RationalRepr {
    pub fn of(r: &BigRational) -> Self {
        RationalRepr {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
            approx: rational_to_f64(r),
        }
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.numer()
        .to_f64()
        .and_then(|n| r.denom().to_f64().map(|d| n / d))
        .unwrap_or(f64::NAN)
}

pub fn rat_u64(p: u64, q: u64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// floor(r) for non-negative r, as u64. Panics on negative input.
pub fn floor_to_u64(r: &BigRational) -> u64 {
    assert!(!r.is_negative(), "floor_to_u64 on negative rational");
    (r.numer() / r.denom())
        .to_u64()
        .expect("rational floor exceeds u64")
}

/// ceil(r) for non-negative r, as u64.
pub fn ceil_to_u64(r: &BigRational) -> u64 {
    assert!(!r.is_negative(), "ceil_to_u64 on negative rational");
    let (q, rem) = num::Integer::div_rem(r.numer(), r.denom());
    let c = if rem.is_zero() { q } else { q + 1 };
    c.to_u64().expect("rational ceiling exceeds u64")
}

/// floor(log2(r)) for r >= 1.
pub fn floor_log2(r: &BigRational) -> u64 {
    assert!(*r >= BigRational::one(), "floor_log2 needs r >= 1");
    let mut k = 0u64;
    let two = BigRational::from(BigInt::from(2));
    let mut pow = two.clone();
    // Smallest k with 2^(k+1) > r.
    while pow <= *r {
        pow *= &two;
        k += 1;
    }
    k
}

/// Exact ceil(n^(p/q)) for n >= 1, q >= 1: the smallest d with d^q >= n^p.
pub fn ceil_pow(n: u64, p: u64, q: u64) -> u64 {
    assert!(n >= 1 && q >= 1);
    if p == 0 {
        return 1;
    }
    let target = BigInt::from(n).pow(p as u32);
    // Bracket with an f64 guess, then binary-search exactly.
    let guess = (n as f64).powf(p as f64 / q as f64);
    let mut lo: u64 = 1;
    let mut hi: u64 = guess.max(1.0) as u64 + 2;
    while BigInt::from(hi).pow(q as u32) < target {
        lo = hi;
        hi = hi.saturating_mul(2);
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if BigInt::from(mid).pow(q as u32) >= target {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Exact test `a^q <= n^p` (used for cardinality bounds of the form
/// `|P| <= n^(p/q)` without rounding).
pub fn pow_le(a: u64, q: u64, n: u64, p: u64) -> bool {
    BigInt::from(a).pow(q as u32) <= BigInt::from(n).pow(p as u32)
}

/// Parses "p", "p/q", or a decimal like "0.25" into an exact rational.
pub fn parse_rational(text: &str) -> Result<BigRational, String> {
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let num: BigInt = p.trim().parse().map_err(|_| format!("bad numerator in {t:?}"))?;
        let den: BigInt = q.trim().parse().map_err(|_| format!("bad denominator in {t:?}"))?;
        if den.is_zero() {
            return Err(format!("zero denominator in {t:?}"));
        }
        return Ok(BigRational::new(num, den));
    }
    if let Some((whole, frac)) = t.split_once('.') {
        let digits = frac.len() as u32;
        let whole: BigInt = if whole.is_empty() {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| format!("bad number {t:?}"))?
        };
        let frac: BigInt = frac.parse().map_err(|_| format!("bad number {t:?}"))?;
        let den = BigInt::from(10u32).pow(digits);
        return Ok(BigRational::new(&whole * &den + frac, den));
    }
    let num: BigInt = t.parse().map_err(|_| format!("bad number {t:?}"))?;
    Ok(BigRational::from(num))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn floor_ceil_basic() {
        let r = rat_u64(7, 2);
        assert_eq!(floor_to_u64(&r), 3);
        assert_eq!(ceil_to_u64(&r), 4);
        let whole = rat_u64(6, 2);
        assert_eq!(floor_to_u64(&whole), 3);
        assert_eq!(ceil_to_u64(&whole), 3);
    }

    #[test]
    fn log2_values() {
        assert_eq!(floor_log2(&rat_u64(1, 1)), 0);
        assert_eq!(floor_log2(&rat_u64(4, 3)), 0);
        assert_eq!(floor_log2(&rat_u64(2, 1)), 1);
        assert_eq!(floor_log2(&rat_u64(4, 1)), 2);
        assert_eq!(floor_log2(&rat_u64(7, 2)), 1);
    }

    #[test]
    fn ceil_pow_examples() {
        assert_eq!(ceil_pow(256, 1, 4), 4);
        assert_eq!(ceil_pow(256, 1, 2), 16);
        assert_eq!(ceil_pow(100, 1, 2), 10);
        assert_eq!(ceil_pow(101, 1, 2), 11);
        assert_eq!(ceil_pow(32, 1, 4), 3); // 2^4 = 16 < 32 <= 81 = 3^4
        assert_eq!(ceil_pow(64, 1, 3), 4);
        assert_eq!(ceil_pow(64, 2, 4), 8);
        assert_eq!(ceil_pow(5, 0, 3), 1);
        assert_eq!(ceil_pow(1, 7, 2), 1);
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3/4").unwrap(), rat_u64(3, 4));
        assert_eq!(parse_rational("0.25").unwrap(), rat_u64(1, 4));
        assert_eq!(parse_rational("2").unwrap(), rat_u64(2, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    proptest! {
        #[test]
        fn ceil_pow_is_tight(n in 1u64..5000, p in 1u64..5, q in 1u64..5) {
            let d = ceil_pow(n, p, q);
            prop_assert!(pow_le(1, 1, 1, 1));
            prop_assert!(BigInt::from(d).pow(q as u32) >= BigInt::from(n).pow(p as u32));
            if d > 1 {
                prop_assert!(BigInt::from(d - 1).pow(q as u32) < BigInt::from(n).pow(p as u32));
            }
        }

        #[test]
        fn floor_ceil_consistent(p in 0i64..10_000, q in 1i64..100) {
            let r = BigRational::new(p.into(), q.into());
            let f = floor_to_u64(&r);
            let c = ceil_to_u64(&r);
            prop_assert!(f <= c && c <= f + 1);
            prop_assert_eq!(f == c, p % q == 0);
        }
    }
}
