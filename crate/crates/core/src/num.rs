//! Exact arithmetic helpers over arbitrary-precision integers and rationals.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Error;

/// Normalized arbitrary-precision rational. Construction always reduces to lowest terms.
pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int<T: Into<BigInt>>(n: T) -> Rational {
    Rational::from_integer(n.into())
}

pub fn rat_big(n: &BigUint, d: &BigUint) -> Rational {
    Rational::new(to_bigint(n), to_bigint(d))
}

pub fn recip(n: &BigUint) -> Rational {
    Rational::new(BigInt::one(), to_bigint(n))
}

pub fn to_bigint(n: &BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, n.clone())
}

/// Integral non-negative value of `r`, if it has one.
pub fn as_biguint(r: &Rational) -> Option<BigUint> {
    if r.is_integer() && !r.is_negative() {
        r.numer().to_biguint()
    } else {
        None
    }
}

pub fn floor_biguint(r: &Rational) -> Option<BigUint> {
    if r.is_negative() {
        return None;
    }
    r.floor().numer().to_biguint()
}

pub fn as_u64(r: &Rational) -> Option<u64> {
    as_biguint(r).and_then(|n| n.to_u64())
}

/// Always prints `p/q`, including integers (`1/1`).
pub fn fmt_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Accepts `p`, `p/q` and `-p/q`.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let bad = || Error::Parse {
        line: 0,
        msg: format!("not a rational: {s:?}"),
    };
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

pub fn lcm_all<'a, I: IntoIterator<Item = &'a BigUint>>(it: I) -> BigUint {
    it.into_iter().fold(BigUint::one(), |acc, x| acc.lcm(x))
}

/// `Σ_{x<n} ⌊(a·x + b)/m⌋` for non-negative `a`, `b` and positive `m`.
pub fn floor_sum(n: &BigUint, m: &BigUint, a: &BigUint, b: &BigUint) -> BigUint {
    let mut n = n.clone();
    let mut m = m.clone();
    let mut a = a.clone();
    let mut b = b.clone();
    let mut ans = BigUint::zero();
    let two = BigUint::from(2u32);
    loop {
        if a >= m {
            let (q, r) = a.div_rem(&m);
            if !n.is_zero() {
                ans += &n * (&n - 1u32) / &two * &q;
            }
            a = r;
        }
        if b >= m {
            let (q, r) = b.div_rem(&m);
            ans += &n * &q;
            b = r;
        }
        let y_max = &a * &n + &b;
        if y_max < m {
            break;
        }
        let (nn, bb) = y_max.div_rem(&m);
        n = nn;
        b = bb;
        std::mem::swap(&mut m, &mut a);
    }
    ans
}

/// Whether some `x ∈ [0, n)` has `(a·x + b) mod m < k`.
pub fn linear_mod_hits_below(
    n: &BigUint,
    m: &BigUint,
    a: &BigUint,
    b: &BigUint,
    k: &BigUint,
) -> bool {
    if n.is_zero() || k.is_zero() {
        return false;
    }
    if k >= m {
        return true;
    }
    let a = a % m;
    let b = b % m;
    let shifted = &b + m - k;
    let hi = floor_sum(n, m, &a, &b) + n;
    let lo = floor_sum(n, m, &a, &shifted);
    hi > lo
}

/// Inverse of `a` modulo `m` for coprime arguments (`m = 1` gives 0).
pub fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    if m.is_one() {
        return Some(BigUint::zero());
    }
    let m_i = to_bigint(m);
    let e = to_bigint(a).extended_gcd(&m_i);
    if !e.gcd.is_one() {
        return None;
    }
    let mut x = e.x % &m_i;
    if x.is_negative() {
        x += &m_i;
    }
    x.to_biguint()
}

/// Symmetric difference `(a - b) mod m` for non-negative values.
pub fn sub_mod(a: &BigUint, b: &BigUint, m: &BigUint) -> BigUint {
    let a = a % m;
    let b = b % m;
    if a >= b {
        a - b
    } else {
        a + m - b
    }
}

pub fn pow_u(base: u64, exp: u32) -> BigUint {
    num_traits::pow(BigUint::from(base), exp as usize)
}

pub fn ceil_rational(r: &Rational) -> BigInt {
    r.ceil().to_integer()
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_floor_sum(n: u64, m: u64, a: u64, b: u64) -> u64 {
        (0..n).map(|x| (a * x + b) / m).sum()
    }

    #[test]
    fn floor_sum_matches_naive() {
        for n in 0..12u64 {
            for m in 1..9u64 {
                for a in 0..11u64 {
                    for b in 0..11u64 {
                        let got = floor_sum(&n.into(), &m.into(), &a.into(), &b.into());
                        assert_eq!(got, naive_floor_sum(n, m, a, b).into(), "{n} {m} {a} {b}");
                    }
                }
            }
        }
    }

    #[test]
    fn hits_below_matches_naive() {
        for n in 0..10u64 {
            for m in 1..9u64 {
                for a in 0..9u64 {
                    for b in 0..9u64 {
                        for k in 0..10u64 {
                            let want = (0..n).any(|x| (a * x + b) % m < k);
                            let got = linear_mod_hits_below(
                                &n.into(),
                                &m.into(),
                                &a.into(),
                                &b.into(),
                                &k.into(),
                            );
                            assert_eq!(got, want, "{n} {m} {a} {b} {k}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn rational_text_round_trip() {
        let r = parse_rational("10/4").unwrap();
        assert_eq!(fmt_rational(&r), "5/2");
        assert_eq!(fmt_rational(&parse_rational("3").unwrap()), "3/1");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn inverse() {
        assert_eq!(mod_inverse(&3u32.into(), &7u32.into()), Some(5u32.into()));
        assert_eq!(mod_inverse(&2u32.into(), &4u32.into()), None);
        assert_eq!(mod_inverse(&5u32.into(), &1u32.into()), Some(0u32.into()));
    }
}
