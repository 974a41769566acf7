//! Exact integer and rational primitives.
//!
//! Everything here is exact: no floating point, no rounding. Integers are
//! [`num_bigint::BigUint`] and rationals are [`num_rational::BigRational`],
//! which is always kept in lowest terms with a positive denominator.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Nonnegative arbitrary-precision integer.
pub type Nat = BigUint;

/// Exact rational in lowest terms.
pub type Rat = BigRational;

/// Floor of the square root: `r*r <= n < (r+1)*(r+1)`.
pub fn isqrt(n: &Nat) -> Nat {
    n.sqrt()
}

/// Square root of `n` when `n` is a perfect square.
pub fn is_perfect_square(n: &Nat) -> Option<Nat> {
    let r = isqrt(n);
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

/// Signed variant used for discriminants; negative input has no root.
pub fn is_perfect_square_signed(n: &BigInt) -> Option<Nat> {
    if n.is_negative() {
        return None;
    }
    is_perfect_square(n.magnitude())
}

/// Floor of the `k`-th root.
pub fn nth_root_floor(n: &Nat, k: u32) -> Nat {
    n.nth_root(k)
}

/// Writes `n = base^exp` with `exp >= 2` and the smallest possible base.
///
/// Exponents are tried from `floor(log2 n)` downward, so the first exact
/// root found carries the largest exponent.
pub fn is_perfect_power(n: &Nat) -> Result<Option<(Nat, u32)>> {
    if *n < Nat::from(2u32) {
        return Err(Error::invalid(format!(
            "perfect-power test needs n >= 2, got {n}"
        )));
    }
    let max_exp = (n.bits() - 1) as u32;
    for k in (2..=max_exp).rev() {
        let root = nth_root_floor(n, k);
        if root.pow(k) == *n {
            return Ok(Some((root, k)));
        }
    }
    Ok(None)
}

/// Returns `z` with `c^z == n`, if any.
pub fn pow_of_base(n: &Nat, c: &Nat) -> Result<Option<u64>> {
    if *c < Nat::from(2u32) {
        return Err(Error::invalid(format!("base must be >= 2, got {c}")));
    }
    if n.is_zero() {
        return Ok(None);
    }
    let mut rest = n.clone();
    let mut z = 0u64;
    while !rest.is_one() {
        let (q, r) = rest.div_rem(c);
        if !r.is_zero() {
            return Ok(None);
        }
        rest = q;
        z += 1;
    }
    Ok(Some(z))
}

pub fn gcd(m: &Nat, n: &Nat) -> Nat {
    m.gcd(n)
}

pub fn rat(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Rat {
    Rat::new(num.into(), den.into())
}

pub fn rat_int(n: impl Into<BigInt>) -> Rat {
    Rat::from_integer(n.into())
}

pub(crate) fn nat(n: u64) -> Nat {
    Nat::from(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: u64) -> Nat {
        Nat::from(v)
    }

    #[test]
    fn isqrt_examples() {
        assert_eq!(isqrt(&n(49)), n(7));
        assert_eq!(isqrt(&n(50)), n(7));
        assert_eq!(isqrt(&n(0)), n(0));
    }

    #[test]
    fn isqrt_exhaustive_to_one_million() {
        for v in 0..=1_000_000u64 {
            let r = isqrt(&n(v));
            let r = u64::try_from(&r).unwrap();
            assert!(r * r <= v && v < (r + 1) * (r + 1), "isqrt({v}) = {r}");
        }
    }

    #[test]
    fn isqrt_large() {
        let big = Nat::from(3u32).pow(2000u32);
        let r = isqrt(&big);
        assert_eq!(r, Nat::from(3u32).pow(1000u32));
        let r = isqrt(&(&big - 1u32));
        assert_eq!(r, Nat::from(3u32).pow(1000u32) - 1u32);
    }

    #[test]
    fn perfect_square_examples() {
        assert_eq!(is_perfect_square(&n(49)), Some(n(7)));
        assert_eq!(is_perfect_square(&n(53)), None);
        assert_eq!(is_perfect_square(&n(1)), Some(n(1)));
        assert_eq!(is_perfect_square_signed(&BigInt::from(-4)), None);
    }

    #[test]
    fn perfect_square_agrees_with_isqrt() {
        for v in 0..20_000u64 {
            let r = isqrt(&n(v));
            assert_eq!(is_perfect_square(&n(v)).is_some(), &r * &r == n(v));
        }
    }

    #[test]
    fn perfect_power_examples() {
        assert_eq!(is_perfect_power(&n(8)).unwrap(), Some((n(2), 3)));
        assert_eq!(is_perfect_power(&n(9)).unwrap(), Some((n(3), 2)));
        assert_eq!(is_perfect_power(&n(7)).unwrap(), None);
        assert_eq!(is_perfect_power(&n(64)).unwrap(), Some((n(2), 6)));
        assert!(is_perfect_power(&n(1)).is_err());
        assert!(is_perfect_power(&n(0)).is_err());
    }

    fn trial_root(v: u64, k: u32) -> Option<u64> {
        // plain linear search; independent of the library root routine
        let mut b = 2u64;
        loop {
            let p = b.checked_pow(k)?;
            if p == v {
                return Some(b);
            }
            if p > v {
                return None;
            }
            b += 1;
        }
    }

    #[test]
    fn perfect_power_matches_trial_roots() {
        for v in 2..=100_000u64 {
            let log2 = 63 - v.leading_zeros();
            let oracle = (2..=log2).rev().find_map(|k| trial_root(v, k).map(|b| (b, k)));
            let got = is_perfect_power(&n(v))
                .unwrap()
                .map(|(b, k)| (u64::try_from(&b).unwrap(), k));
            assert_eq!(got, oracle, "n = {v}");
        }
    }

    #[test]
    fn pow_of_base_examples() {
        assert_eq!(pow_of_base(&n(9), &n(3)).unwrap(), Some(2));
        assert_eq!(pow_of_base(&n(27), &n(3)).unwrap(), Some(3));
        assert_eq!(pow_of_base(&n(28), &n(3)).unwrap(), None);
        assert_eq!(pow_of_base(&n(1), &n(5)).unwrap(), Some(0));
        assert!(pow_of_base(&n(4), &n(1)).is_err());
    }

    #[test]
    fn pow_of_base_round_trip() {
        for c in 2..=20u64 {
            for z in 0..=40u32 {
                let v = n(c).pow(z);
                assert_eq!(pow_of_base(&v, &n(c)).unwrap(), Some(z as u64));
                if z > 0 {
                    assert_eq!(pow_of_base(&(&v + 1u32), &n(c)).unwrap(), None);
                }
            }
        }
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd(&n(2), &n(5)), n(1));
        assert_eq!(gcd(&n(6), &n(4)), n(2));
        assert_eq!(gcd(&n(0), &n(7)), n(7));
    }

    #[test]
    fn rationals_are_normalized() {
        let r = rat(6, -4);
        assert_eq!(*r.numer(), BigInt::from(-3));
        assert_eq!(*r.denom(), BigInt::from(2));
        assert_eq!(rat(2, 4), rat(1, 2));
    }

    #[test]
    fn wide_values_stay_exact() {
        let big = Nat::from(2u32).pow(4096u32) + 1u32;
        let sq = &big * &big;
        assert_eq!(is_perfect_square(&sq), Some(big.clone()));
        assert_eq!(is_perfect_power(&sq).unwrap(), Some((big, 2)));
    }
}
