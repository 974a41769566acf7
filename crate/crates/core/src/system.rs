//! The system `a^2 + b = c^z`, `a + b^2 = c^Z`.
//!
//! Two independent routes: [`brute_force_system`] searches directly, and
//! [`theorem_certificate`] walks the case analysis (`f = 1`, `f >= 2` with
//! `c^(Z-z) >= 3`, `c^(Z-z) = 2`) with exact arithmetic and records every
//! step as a [`ProofTrace`]. The certificate is only issued when both agree.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{
    gcd, is_perfect_power, is_perfect_square, is_perfect_square_signed, isqrt, nat, pow_of_base,
    rat, rat_int, Nat, Rat,
};
use crate::error::{Error, Result};
use crate::serde_dec;

/// A solution `(a, b, c, z, Z)` of the system.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SystemSolution {
    #[serde(with = "serde_dec")]
    pub a: Nat,
    #[serde(with = "serde_dec")]
    pub b: Nat,
    #[serde(with = "serde_dec")]
    pub c: Nat,
    pub z: u64,
    #[serde(rename = "Z")]
    pub big_z: u64,
}

impl SystemSolution {
    /// Both equations, `min(a, b, c) > 1` and `gcd(a, b) = 1`.
    pub fn holds(&self) -> bool {
        let two = nat(2);
        let (Ok(z), Ok(big_z)) = (u32::try_from(self.z), u32::try_from(self.big_z)) else {
            return false;
        };
        self.a >= two
            && self.b >= two
            && self.c >= two
            && gcd(&self.a, &self.b).is_one()
            && &self.a * &self.a + &self.b == self.c.pow(z)
            && &self.a + &self.b * &self.b == self.c.pow(big_z)
    }

    /// `(b, a, c, Z, z)`.
    pub fn swapped(&self) -> SystemSolution {
        SystemSolution {
            a: self.b.clone(),
            b: self.a.clone(),
            c: self.c.clone(),
            z: self.big_z,
            big_z: self.z,
        }
    }

    /// The orientation with `a < b`.
    pub fn oriented(&self) -> SystemSolution {
        if self.a < self.b {
            self.clone()
        } else {
            self.swapped()
        }
    }

    fn sort_key(&self) -> (Nat, Nat, Nat) {
        let z = u32::try_from(self.z).expect("exponent fits in u32");
        (self.c.clone(), self.c.pow(z), self.a.clone())
    }
}

fn sort_solutions(v: &mut [SystemSolution]) {
    v.sort_by_cached_key(|s| s.sort_key());
}

// ---------------------------------------------------------------------------
// Direct search
// ---------------------------------------------------------------------------

const U63: u128 = 1 << 63;

/// Every solution with base `c`, `2 <= a <= a_max` and `z <= z_max`, sorted
/// by `(c^z, a)`.
///
/// For each `z` and `a` with `a^2 < c^z`, sets `b = c^z - a^2` and tests
/// whether `a + b^2` is a power of `c`. When `c^z` is large the test first
/// reduces modulo the largest power of `c` below `2^63`: a power of `c` that
/// big must vanish there.
pub fn brute_force_system(c: u64, a_max: u64, z_max: u32) -> Result<Vec<SystemSolution>> {
    if c < 2 || a_max < 2 || z_max < 2 {
        return Err(Error::invalid(format!(
            "need c >= 2, a_max >= 2, z_max >= 2; got c = {c}, a_max = {a_max}, z_max = {z_max}"
        )));
    }
    let cn = nat(c);
    let c128 = c as u128;
    let mut modulus = c128;
    while modulus * c128 < U63 {
        modulus *= c128;
    }

    let mut out = Vec::new();
    let mut cz = Nat::one();
    for z in 1..=z_max {
        cz *= &cn;
        let a_top = isqrt(&(&cz - 1u32)).to_u64().map_or(a_max, |r| r.min(a_max));
        if let Some(cz_small) = cz.to_u128().filter(|&v| v < U63) {
            for a in 2..=a_top {
                let a2 = (a as u128) * (a as u128);
                let b = cz_small - a2;
                if b < 2 || gcd_u128(a as u128, b) != 1 {
                    continue;
                }
                if let Some(big_z) = pow_of_base_u128(a as u128 + b * b, c128) {
                    out.push(SystemSolution {
                        a: nat(a),
                        b: Nat::from(b),
                        c: cn.clone(),
                        z: z as u64,
                        big_z,
                    });
                }
            }
        } else {
            let cz_mod = (&cz % modulus).to_u128().expect("residue below 2^63");
            // below a_lo, b >= 2^32 so a + b^2 exceeds the modulus
            let a_lo = isqrt(&(&cz - (1u64 << 32))).to_u64().unwrap_or(u64::MAX);
            for a in 2..=a_top {
                if a <= a_lo {
                    if gcd_u128(a as u128, c128) != 1 {
                        continue;
                    }
                    let a2 = ((a as u128) * (a as u128)) % modulus;
                    let b_mod = (cz_mod + modulus - a2) % modulus;
                    if !(a as u128 % modulus + b_mod * b_mod % modulus).is_multiple_of(modulus) {
                        continue;
                    }
                }
                if let Some(s) = exact_system_check(a, &cz, &cn, z as u64)? {
                    out.push(s);
                }
            }
        }
    }
    debug_assert!(out.iter().all(SystemSolution::holds));
    Ok(out)
}

fn exact_system_check(a: u64, cz: &Nat, c: &Nat, z: u64) -> Result<Option<SystemSolution>> {
    let a = nat(a);
    let a2 = &a * &a;
    if a2 >= *cz {
        return Ok(None);
    }
    let b = cz - &a2;
    if b < nat(2) || !gcd(&a, &b).is_one() {
        return Ok(None);
    }
    let Some(big_z) = pow_of_base(&(&a + &b * &b), c)? else {
        return Ok(None);
    };
    Ok(Some(SystemSolution {
        a,
        b,
        c: c.clone(),
        z,
        big_z,
    }))
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    a.gcd(&b)
}

fn pow_of_base_u128(mut n: u128, c: u128) -> Option<u64> {
    if n == 0 {
        return None;
    }
    let mut k = 0;
    while n.is_multiple_of(c) {
        n /= c;
        k += 1;
    }
    (n == 1).then_some(k)
}

/// Union of [`brute_force_system`] over `c_min <= c <= c_max`, sorted by
/// `(c, c^z, a)`. Bases are searched in parallel.
pub fn brute_force_system_range(
    c_min: u64,
    c_max: u64,
    a_max: u64,
    z_max: u32,
) -> Result<Vec<SystemSolution>> {
    let parts: Vec<Vec<SystemSolution>> = (c_min.max(2)..=c_max)
        .into_par_iter()
        .map(|c| brute_force_system(c, a_max, z_max))
        .collect::<Result<_>>()?;
    let mut all: Vec<_> = parts.into_iter().flatten().collect();
    sort_solutions(&mut all);
    Ok(all)
}

// ---------------------------------------------------------------------------
// Quantities from the case analysis
// ---------------------------------------------------------------------------

fn require_increasing(a: &Nat, b: &Nat) -> Result<()> {
    if a >= b {
        return Err(Error::invalid(format!(
            "expected the orientation a < b, got a = {a}, b = {b}"
        )));
    }
    Ok(())
}

fn exponent(e: u64) -> Result<u32> {
    u32::try_from(e).map_err(|_| Error::invalid(format!("exponent {e} too large")))
}

/// `f = (a^3 + 2ab - 1) / c^Z` where `c^Z = a + b^2`.
pub fn compute_f(a: &Nat, b: &Nat, c: &Nat, big_z: u64) -> Result<Nat> {
    require_increasing(a, b)?;
    if !gcd(a, c).is_one() {
        return Err(Error::invalid(format!("gcd({a}, {c}) != 1")));
    }
    let cz = c.pow(exponent(big_z)?);
    if cz != a + b * b {
        return Err(Error::invalid(format!(
            "{c}^{big_z} = {cz} differs from a + b^2 = {}",
            a + b * b
        )));
    }
    let num = a.pow(3u32) + nat(2) * a * b - 1u32;
    exact_quotient("f", num, cz)
}

/// `g = (ab - 1) / c^z` where `c^z = a^2 + b`.
pub fn compute_g(a: &Nat, b: &Nat, c: &Nat, z: u64) -> Result<Nat> {
    require_increasing(a, b)?;
    if !gcd(&(a * b), c).is_one() {
        return Err(Error::invalid(format!("gcd(ab, c) != 1 for ({a}, {b}, {c})")));
    }
    let cz = c.pow(exponent(z)?);
    if cz != a * a + b {
        return Err(Error::invalid(format!(
            "{c}^{z} = {cz} differs from a^2 + b = {}",
            a * a + b
        )));
    }
    exact_quotient("g", a * b - 1u32, cz)
}

fn exact_quotient(what: &'static str, num: Nat, den: Nat) -> Result<Nat> {
    let (q, r) = num.div_rem(&den);
    if !r.is_zero() {
        return Err(Error::NotDivisible {
            what,
            numerator: num.to_string(),
            denominator: den.to_string(),
        });
    }
    Ok(q)
}

/// `D = f a^3 + a^2 - f^2 a - f`, the discriminant of
/// `f b^2 - 2ab - a^3 + fa + 1 = 0` read as a quadratic in `b` (up to a
/// factor 4). Negative values mean no real root.
pub fn discriminant(a: &Nat, f: &Nat) -> BigInt {
    let a = BigInt::from(a.clone());
    let f = BigInt::from(f.clone());
    &f * a.pow(3) + a.pow(2) - f.pow(2) * &a - &f
}

/// The root `b = (a + sqrt(D)) / f` when it is an integer greater than `a`.
pub fn b_from_af(a: &Nat, f: &Nat) -> Option<Nat> {
    if f.is_zero() {
        return None;
    }
    let s = is_perfect_square_signed(&discriminant(a, f))?;
    let (b, r) = (a + s).div_rem(f);
    (r.is_zero() && b > *a).then_some(b)
}

/// Residual of `f b^2 - 2ab - a^3 + fa + 1`.
pub fn quadratic_residual(a: &Nat, b: &Nat, f: &Nat) -> BigInt {
    let (a, b, f) = (
        BigInt::from(a.clone()),
        BigInt::from(b.clone()),
        BigInt::from(f.clone()),
    );
    &f * &b * &b - BigInt::from(2) * &a * &b - a.pow(3) + &f * &a + 1
}

/// Radicand `q = a/f + 1/f^2 - 1/a - 1/(f a^2)` and rational part `1/f` of
/// the bound `g_u = 1/f + sqrt(q)`.
pub fn gu_squared_terms(a: &Nat, f: &Nat) -> Result<(Rat, Rat)> {
    if *a < nat(2) || f.is_zero() {
        return Err(Error::invalid(format!("need a >= 2 and f >= 1, got ({a}, {f})")));
    }
    let ai = BigInt::from(a.clone());
    let fi = BigInt::from(f.clone());
    let q = Rat::new(ai.clone(), fi.clone()) + Rat::new(BigInt::one(), &fi * &fi)
        - Rat::new(BigInt::one(), ai.clone())
        - Rat::new(BigInt::one(), &fi * &ai * &ai);
    if q.is_negative() {
        return Err(Error::NegativeRadicand {
            a: a.to_string(),
            f: f.to_string(),
        });
    }
    let fa = &fi * &ai;
    if &q * rat_int(&fa * &fa) != rat_int(discriminant(a, f)) {
        return Err(Error::Assertion(format!(
            "(fa)^2 q != D for (a, f) = ({a}, {f})"
        )));
    }
    Ok((q, Rat::new(BigInt::one(), fi)))
}

/// Exact test of `(1 - 1/m) a <= g_u/m + g_u^2` with `g_u = 1/f + sqrt(q)`.
///
/// Expanding `g_u^2` leaves `L <= sqrt(q) * R` with rational `L` and
/// `R = 1/m + 2/f > 0`. Scaling by `m f^2 a^2` and using `q = D / (fa)^2`
/// turns this into `L' <= sqrt(D) * a (f + 2m)` with integers
/// `L' = (m-1) f^2 a^3 - f a^2 - m a^2 - m D`. If `L' <= 0` it holds
/// outright, otherwise compare squares.
pub fn inequality_holds(a: &Nat, f: &Nat, m: &Nat) -> Result<bool> {
    if *m < nat(2) {
        return Err(Error::invalid(format!("need m >= 2, got {m}")));
    }
    if *a < nat(2) || f.is_zero() {
        return Err(Error::invalid(format!("need a >= 2 and f >= 1, got ({a}, {f})")));
    }
    let d = discriminant(a, f);
    if d.is_negative() {
        return Err(Error::NegativeRadicand {
            a: a.to_string(),
            f: f.to_string(),
        });
    }
    let (ai, fi, mi) = (
        BigInt::from(a.clone()),
        BigInt::from(f.clone()),
        BigInt::from(m.clone()),
    );
    let a2 = &ai * &ai;
    let l: BigInt = (&mi - 1) * &fi * &fi * &a2 * &ai - &fi * &a2 - &mi * &a2 - &mi * &d;
    if !l.is_positive() {
        return Ok(true);
    }
    let r = &ai * (&fi + BigInt::from(2) * &mi);
    Ok(&l * &l <= d * &r * &r)
}

/// The same comparison carried out directly on rationals.
pub fn inequality_holds_rational(a: &Nat, f: &Nat, m: &Nat) -> Result<bool> {
    if *m < nat(2) {
        return Err(Error::invalid(format!("need m >= 2, got {m}")));
    }
    let (q, inv_f) = gu_squared_terms(a, f)?;
    let inv_m = Rat::new(BigInt::one(), BigInt::from(m.clone()));
    let lhs = (Rat::one() - &inv_m) * rat_int(a.clone());
    let l = lhs - (&inv_f * &inv_m + &inv_f * &inv_f + &q);
    if !l.is_positive() {
        return Ok(true);
    }
    let r = inv_m + rat_int(2) * inv_f;
    Ok(&l * &l <= q * &r * &r)
}

// ---------------------------------------------------------------------------
// Proof trace
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Branch {
    #[serde(rename = "f_eq_1")]
    FEq1,
    /// `f >= 2` and `c^(Z-z) >= 3`.
    #[serde(rename = "f_ge_2_m_gt_2")]
    FGe2MGt2,
    /// `f >= 2` and `c^(Z-z) = 2`.
    #[serde(rename = "f_ge_2_m_eq_2")]
    FGe2MEq2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Solution,
    Contradiction,
    /// The input does not belong to the branch it was routed to.
    NotApplicable,
}

/// One step of the case analysis. Numeric fields are `None` when the step
/// does not pin that quantity down.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofTrace {
    pub branch: Branch,
    #[serde(with = "serde_dec::option")]
    pub a: Option<Nat>,
    #[serde(with = "serde_dec::option")]
    pub f: Option<Nat>,
    #[serde(with = "serde_dec::option")]
    pub g: Option<Nat>,
    #[serde(rename = "D", with = "serde_dec::option")]
    pub d: Option<BigInt>,
    #[serde(with = "serde_dec::option")]
    pub m: Option<Nat>,
    pub verdict: Verdict,
    pub detail: String,
}

impl ProofTrace {
    /// Recomputes `D` from the recorded `(a, f)`.
    pub fn discriminant_consistent(&self) -> bool {
        match (&self.a, &self.f, &self.d) {
            (Some(a), Some(f), Some(d)) => discriminant(a, f) == *d,
            (_, _, None) => true,
            _ => false,
        }
    }
}

// ---------------------------------------------------------------------------
// f = 1
// ---------------------------------------------------------------------------

fn poly(r: &Nat, coeffs: &[u64]) -> Nat {
    // highest degree first
    coeffs.iter().fold(Nat::zero(), |acc, &k| acc * r + k)
}

/// With `f = 1` the root forces `a = r^2 + 1`; replays the resulting
/// polynomial values and the ratio `c^(Z-z) / c^(2z-Z)`.
pub fn f1_branch(r: u64) -> Result<ProofTrace> {
    f1_branch_full(r).map(|(t, _)| t)
}

fn f1_branch_full(r: u64) -> Result<(ProofTrace, Option<SystemSolution>)> {
    if r == 0 {
        return Err(Error::invalid("f = 1 branch needs r >= 1"));
    }
    let rn = nat(r);
    let a = poly(&rn, &[1, 0, 1]);
    let f = Nat::one();
    let d = discriminant(&a, &f);
    // D = (a + 1)^2 (a - 1) = ((a + 1) r)^2
    let s = is_perfect_square_signed(&d)
        .ok_or_else(|| Error::Assertion(format!("D = {d} is not a square at r = {r}")))?;
    let b = &a + &s;
    let v_z = &a * &a + &b;
    let v_big_z = &a + &b * &b;
    let m = poly(&rn, &[1, 1, 1]);
    let n = poly(&rn, &[1, 0, 2]);

    let checks = [
        (b == poly(&rn, &[1, 1, 2, 1]), "b = r^3+r^2+2r+1"),
        (v_z == poly(&rn, &[1, 1, 3, 2, 2]), "c^z = r^4+r^3+3r^2+2r+2"),
        (
            v_big_z == poly(&rn, &[1, 2, 5, 6, 7, 4, 2]),
            "c^Z = r^6+2r^5+5r^4+6r^3+7r^2+4r+2",
        ),
        (&m * &n == v_z, "c^(Z-z) c^(2z-Z) = c^z"),
        (&m * &v_z == v_big_z, "c^(Z-z) c^z = c^Z"),
        (quadratic_residual(&a, &b, &f).is_zero(), "quadratic residual"),
    ];
    if let Some((_, what)) = checks.iter().find(|(ok, _)| !ok) {
        return Err(Error::Assertion(format!("f = 1 identity {what} fails at r = {r}")));
    }

    let g = {
        let (q, rem) = (&a * &b - 1u32).div_rem(&v_z);
        rem.is_zero().then_some(q)
    };
    let ratio = Rat::new(BigInt::from(m.clone()), BigInt::from(n.clone()));
    let mut trace = ProofTrace {
        branch: Branch::FEq1,
        a: Some(a.clone()),
        f: Some(f),
        g,
        d: Some(d),
        m: Some(m.clone()),
        verdict: Verdict::Contradiction,
        detail: String::new(),
    };

    if ratio.is_one() {
        // m = n = c^(Z-z) = c^(2z-Z); take c as the root of m
        let c = is_perfect_power(&m)?.map_or_else(|| m.clone(), |(base, _)| base);
        let z = pow_of_base(&v_z, &c)?;
        let big_z = pow_of_base(&v_big_z, &c)?;
        let (Some(z), Some(big_z)) = (z, big_z) else {
            return Err(Error::Assertion(format!(
                "r = {r}: {v_z} and {v_big_z} are not both powers of {c}"
            )));
        };
        let sol = SystemSolution {
            a,
            b,
            c,
            z,
            big_z,
        };
        if !sol.holds() {
            return Err(Error::Assertion(format!("r = {r}: {sol:?} fails the system")));
        }
        trace.verdict = Verdict::Solution;
        trace.detail = format!(
            "r = {r}: a = {}, b = {}, c^z = {v_z}, c^Z = {v_big_z}, ratio (r^2+r+1)/(r^2+2) = 1, \
             so (c, z, Z) = ({}, {}, {})",
            sol.a, sol.b, sol.c, sol.z, sol.big_z
        );
        return Ok((trace, Some(sol)));
    }

    // ratio = 1 + (r-1)/(r^2+2) lies strictly between 1 and 2
    if !(ratio > Rat::one() && ratio < rat_int(2)) {
        return Err(Error::Assertion(format!(
            "r = {r}: ratio {ratio} outside (1, 2)"
        )));
    }
    trace.detail = format!(
        "r = {r}: a = {}, b = {b}, c^z = {v_z}, c^Z = {v_big_z}; \
         c^(Z-z)/c^(2z-Z) = {m}/{n} = {ratio} lies strictly between 1 and 2, \
         so it is no integral power of c >= 2 (holds for every r >= 2 since 0 < (r-1)/(r^2+2) < 1)",
        trace.a.as_ref().expect("set above")
    );
    Ok((trace, None))
}

// ---------------------------------------------------------------------------
// f >= 2, c^(Z-z) >= 3
// ---------------------------------------------------------------------------

/// An `(a, f)` pair passing the `m = 3` inequality with `D >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidatePair {
    pub a: u64,
    pub f: u64,
    #[serde(rename = "D", with = "serde_dec")]
    pub d: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateSearch {
    /// Largest `a` for which the `f = 2`, `m = 3` inequality holds.
    pub a_max: u64,
    pub candidates: Vec<CandidatePair>,
    /// `(a, f, b)` where `b = (a + sqrt(D)) / f` is an integer above `a`.
    pub survivors: Vec<(u64, u64, u64)>,
}

/// Number of consecutive failures that ends the upward scan for `a_max`.
pub const CUTOFF_RUN: u64 = 64;

/// Moduli `m` used to re-check that `m = 3` is the weakest case.
const MONOTONE_CHECK_M: [u64; 3] = [4, 6, 10];

fn holds_u64(a: u64, f: u64, m: u64) -> Result<bool> {
    inequality_holds(&nat(a), &nat(f), &nat(m))
}

/// Finds `a_max`, enumerates every `(a, f)` with `a <= a_max`,
/// `2 <= f <= a^2 + 1`, `D >= 0` and the `m = 3` inequality, and keeps the
/// pairs whose quadratic has an integral root `b > a`.
pub fn candidate_search_f_ge2() -> Result<CandidateSearch> {
    let mut a_max = None;
    let mut misses = 0;
    let mut a = 2u64;
    while misses < CUTOFF_RUN {
        if holds_u64(a, 2, 3)? {
            a_max = Some(a);
            misses = 0;
        } else {
            misses += 1;
        }
        a += 1;
    }
    let a_max = a_max.ok_or_else(|| Error::Assertion("inequality never holds at f = 2".into()))?;
    for far in [2 * a_max, 10 * a_max] {
        if holds_u64(far, 2, 3)? {
            return Err(Error::Assertion(format!(
                "inequality holds again at a = {far} beyond a_max = {a_max}"
            )));
        }
    }
    let scanned = a - 1;
    check_monotonicity(scanned)?;

    let per_a: Vec<Vec<CandidatePair>> = (2..=a_max)
        .into_par_iter()
        .map(|a| {
            let mut row = Vec::new();
            for f in 2..=a * a + 1 {
                let d = discriminant(&nat(a), &nat(f));
                if d.is_negative() {
                    continue;
                }
                if holds_u64(a, f, 3)? {
                    row.push(CandidatePair { a, f, d });
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    let candidates: Vec<CandidatePair> = per_a.into_iter().flatten().collect();

    let survivors: Vec<(u64, u64, u64)> = candidates
        .iter()
        .filter_map(|p| {
            b_from_af(&nat(p.a), &nat(p.f))
                .map(|b| (p.a, p.f, b.to_u64().expect("b is small here")))
        })
        .collect();
    if survivors != [(3, 2, 5)] {
        return Err(Error::Assertion(format!(
            "unexpected survivors {survivors:?} in the f >= 2, m >= 3 branch"
        )));
    }
    Ok(CandidateSearch {
        a_max,
        candidates,
        survivors,
    })
}

/// Over `2 <= a <= a_top`, `2 <= f` with `D >= 0`: the inequality at `(a, f, 3)`
/// implies it at `(a, 2, 3)`, and at `(a, f, m)` for larger `m` implies it at
/// `(a, f, 3)`.
fn check_monotonicity(a_top: u64) -> Result<()> {
    (2..=a_top).into_par_iter().try_for_each(|a| {
        let at_f2 = holds_u64(a, 2, 3)?;
        for f in 2..=a * a + 1 {
            if discriminant(&nat(a), &nat(f)).is_negative() {
                continue;
            }
            let at_m3 = holds_u64(a, f, 3)?;
            if at_m3 && !at_f2 {
                return Err(Error::Assertion(format!(
                    "inequality at (a, f) = ({a}, {f}) holds but fails at f = 2"
                )));
            }
            if !at_m3 {
                for m in MONOTONE_CHECK_M {
                    if holds_u64(a, f, m)? {
                        return Err(Error::Assertion(format!(
                            "inequality at (a, f, m) = ({a}, {f}, {m}) holds but fails at m = 3"
                        )));
                    }
                }
            }
        }
        Ok(())
    })
}

/// Shows that a surviving `(a, b)` admits no base `c` with `a^2 + b = c^z`,
/// `a + b^2 = c^Z` and `c^(Z-z) >= 3`.
pub fn reject_survivor(a: &Nat, b: &Nat) -> Result<ProofTrace> {
    let u = a * a + b;
    let w = a + b * b;
    let not_applicable = |detail: String| ProofTrace {
        branch: Branch::FGe2MGt2,
        a: Some(a.clone()),
        f: None,
        g: None,
        d: None,
        m: None,
        verdict: Verdict::NotApplicable,
        detail,
    };
    if a >= b || *a < nat(2) {
        return Ok(not_applicable(format!(
            "({a}, {b}) is not an oriented pair with 2 <= a < b"
        )));
    }
    let (f, rem) = (a.pow(3u32) + nat(2) * a * b - 1u32).div_rem(&w);
    if !rem.is_zero() {
        return Ok(not_applicable(format!(
            "a + b^2 = {w} does not divide a^3 + 2ab - 1; no integral f"
        )));
    }
    if f < nat(2) {
        return Ok(not_applicable(format!(
            "f = {f} for (a, b) = ({a}, {b}); handled by the f = 1 branch"
        )));
    }
    let g = {
        let (g, rem) = (a * b - 1u32).div_rem(&u);
        rem.is_zero().then_some(g)
    };
    let d = discriminant(a, &f);

    let mut common = Vec::new();
    let mut c = nat(2);
    while c <= w {
        if let (Some(z), Some(big_z)) = (pow_of_base(&u, &c)?, pow_of_base(&w, &c)?) {
            common.push((c.clone(), z, big_z));
        }
        c += 1u32;
    }
    for (c, z, big_z) in &common {
        if big_z > z && c.pow(exponent(big_z - z)?) >= nat(3) {
            return Err(Error::Assertion(format!(
                "({a}, {b}) solves the system with c = {c}, z = {z}, Z = {big_z}"
            )));
        }
    }
    let (ratio, ratio_rem) = w.div_rem(&u);
    let ratio_note = if ratio_rem.is_zero() {
        format!(
            "(a+b^2)/(a^2+b) = {ratio}, so any common base would force c^(Z-z) = {ratio}{}",
            if ratio < nat(3) { ", outside m >= 3" } else { "" }
        )
    } else {
        "(a+b^2)/(a^2+b) is not an integer".to_string()
    };
    let common_note = if common.is_empty() {
        "no base c >= 2 makes both powers of c".to_string()
    } else {
        format!("common bases {common:?} all have c^(Z-z) < 3")
    };
    Ok(ProofTrace {
        branch: Branch::FGe2MGt2,
        a: Some(a.clone()),
        f: Some(f),
        g,
        d: Some(d),
        m: ratio_rem.is_zero().then_some(ratio),
        verdict: Verdict::Contradiction,
        detail: format!(
            "survivor (a, b) = ({a}, {b}): a^2+b = {u}, a+b^2 = {w}; {ratio_note}; {common_note}"
        ),
    })
}

// ---------------------------------------------------------------------------
// f >= 2, c^(Z-z) = 2
// ---------------------------------------------------------------------------

/// Exponent range over which the parity argument is replayed numerically.
const M2_Z_CHECK: u32 = 256;

/// `c^(Z-z) = 2` forces `c = 2`, `Z = z + 1`; then `2^z | b - a` gives
/// `b > 2^z` while `b^2 < 2^(z+1)`, which cannot both hold.
pub fn case_m_eq_2() -> Result<ProofTrace> {
    let two = nat(2);
    if is_perfect_power(&two)?.is_some() {
        return Err(Error::Assertion("2 reported as a perfect power".into()));
    }

    // (b - a)(b + a - 1) = (a + b^2) - (a^2 + b), and for odd a, b the
    // second factor is odd so the 2-adic valuation sits in b - a
    for a in (1..60u64).step_by(2) {
        for b in (a + 2..120u64).step_by(2) {
            let lhs = (b - a) * (b + a - 1);
            if lhs != (a + b * b) - (a * a + b) {
                return Err(Error::Assertion(format!("factorization fails at ({a}, {b})")));
            }
            if lhs.trailing_zeros() != (b - a).trailing_zeros() {
                return Err(Error::Assertion(format!("valuation moves at ({a}, {b})")));
            }
        }
    }

    // b >= 2^z + 1 forces a + b^2 > 2^(z+1)
    for z in 1..=M2_Z_CHECK {
        let low_b = (Nat::one() << z) + 1u32;
        if &low_b * &low_b <= (Nat::one() << (z + 1)) || z + 1 > 2 * z {
            return Err(Error::Assertion(format!("parity bound fails at z = {z}")));
        }
    }

    let oracle = brute_force_system(2, 10_000, 40)?;
    if !oracle.is_empty() {
        return Err(Error::Assertion(format!(
            "direct search found {} solution(s) with c = 2",
            oracle.len()
        )));
    }

    Ok(ProofTrace {
        branch: Branch::FGe2MEq2,
        a: None,
        f: None,
        g: None,
        d: None,
        m: Some(two),
        verdict: Verdict::Contradiction,
        detail: format!(
            "c^(Z-z) = 2 gives c = 2 and Z = z+1; a, b odd and (b-a)(b+a-1) = 2^z give 2^z | b-a, \
             so b > 2^z, while 2^(z+1) = a+b^2 > b^2 > 2^(2z): z+1 > 2z impossible for z >= 1 \
             (bound checked for z <= {M2_Z_CHECK}); direct search with c = 2, a <= 10000, z <= 40 is empty"
        ),
    })
}

// ---------------------------------------------------------------------------
// Certificate
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
pub struct CertifyOptions {
    /// `r` values replayed in the `f = 1` branch.
    pub r_scan: u64,
    pub oracle_c_max: u64,
    pub oracle_a_max: u64,
    pub oracle_z_max: u32,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        CertifyOptions {
            r_scan: 10_000,
            oracle_c_max: 200,
            oracle_a_max: 10_000,
            oracle_z_max: 40,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleSummary {
    pub c_max: u64,
    pub a_max: u64,
    pub z_max: u32,
    pub solutions: Vec<SystemSolution>,
    pub agrees: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SurvivorSummary {
    pub a_max: u64,
    pub candidates: usize,
    pub survivors: Vec<(u64, u64, u64)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub solutions: Vec<SystemSolution>,
    pub r_scan: u64,
    pub candidate_search: SurvivorSummary,
    pub oracle: OracleSummary,
    pub traces: Vec<ProofTrace>,
}

/// Replays the whole case analysis and checks it against direct search.
pub fn theorem_certificate(opts: &CertifyOptions) -> Result<Certificate> {
    if opts.r_scan == 0 {
        return Err(Error::invalid("r_scan must be >= 1"));
    }
    let mut traces = Vec::new();
    let mut found = Vec::new();

    let f1: Vec<(ProofTrace, Option<SystemSolution>)> = (1..=opts.r_scan)
        .into_par_iter()
        .map(f1_branch_full)
        .collect::<Result<_>>()?;
    for (trace, sol) in f1 {
        traces.push(trace);
        found.extend(sol);
    }

    let search = candidate_search_f_ge2()?;
    for p in &search.candidates {
        let (an, fnat) = (nat(p.a), nat(p.f));
        if let Some(b) = b_from_af(&an, &fnat) {
            traces.push(reject_survivor(&an, &b)?);
            continue;
        }
        let detail = match is_perfect_square_signed(&p.d) {
            None => format!("D = {} is not a perfect square", p.d),
            Some(s) => format!(
                "D = {} = {s}^2 but (a + {s})/f is not an integer above a",
                p.d
            ),
        };
        traces.push(ProofTrace {
            branch: Branch::FGe2MGt2,
            a: Some(an),
            f: Some(fnat),
            g: None,
            d: Some(p.d.clone()),
            m: Some(nat(3)),
            verdict: Verdict::Contradiction,
            detail,
        });
    }
    traces.push(case_m_eq_2()?);

    let mut solutions: Vec<SystemSolution> = found
        .iter()
        .flat_map(|s| [s.clone(), s.swapped()])
        .collect();
    sort_solutions(&mut solutions);
    solutions.dedup();

    let oracle = brute_force_system_range(2, opts.oracle_c_max, opts.oracle_a_max, opts.oracle_z_max)?;
    for s in &oracle {
        check_solution_relations(s)?;
    }
    let in_range: BTreeSet<_> = solutions
        .iter()
        .filter(|s| {
            s.c <= nat(opts.oracle_c_max)
                && s.a <= nat(opts.oracle_a_max)
                && s.z <= u64::from(opts.oracle_z_max)
        })
        .cloned()
        .collect();
    let oracle_set: BTreeSet<_> = oracle.iter().cloned().collect();
    if in_range != oracle_set {
        return Err(Error::Assertion(format!(
            "case analysis gives {in_range:?} but direct search gives {oracle_set:?}"
        )));
    }
    for t in &traces {
        if !t.discriminant_consistent() {
            return Err(Error::Assertion(format!("trace records inconsistent D: {t:?}")));
        }
        if t.verdict == Verdict::Solution && t.branch != Branch::FEq1 {
            return Err(Error::Assertion(format!("solution verdict outside f = 1: {t:?}")));
        }
    }

    Ok(Certificate {
        solutions,
        r_scan: opts.r_scan,
        candidate_search: SurvivorSummary {
            a_max: search.a_max,
            candidates: search.candidates.len(),
            survivors: search.survivors,
        },
        oracle: OracleSummary {
            c_max: opts.oracle_c_max,
            a_max: opts.oracle_a_max,
            z_max: opts.oracle_z_max,
            solutions: oracle,
            agrees: true,
        },
        traces,
    })
}

/// Relations every solution satisfies in the `a < b` orientation:
/// `2z > Z`, `f + g^2 >= a`, `g^2 = -f (mod a)` and `f c^(Z-z) = a + g`.
pub fn check_solution_relations(s: &SystemSolution) -> Result<()> {
    if !s.holds() {
        return Err(Error::Assertion(format!("{s:?} does not solve the system")));
    }
    let o = s.oriented();
    let fail = |what: &str| Err(Error::Assertion(format!("{what} fails for {o:?}")));
    if 2 * o.z <= o.big_z || o.z >= o.big_z {
        return fail("z < Z < 2z");
    }
    let f = compute_f(&o.a, &o.b, &o.c, o.big_z)?;
    let g = compute_g(&o.a, &o.b, &o.c, o.z)?;
    if &f + &g * &g < o.a {
        return fail("f + g^2 >= a");
    }
    if (&g * &g + &f) % &o.a != Nat::zero() {
        return fail("g^2 = -f (mod a)");
    }
    let m = o.c.pow(exponent(o.big_z - o.z)?);
    if &f * &m != &o.a + &g {
        return fail("f = (a + g)/c^(Z-z)");
    }
    Ok(())
}

/// `g_u` as an exact rational, when `q` is the square of a rational.
pub fn gu_value_if_rational(a: &Nat, f: &Nat) -> Result<Option<Rat>> {
    let (q, inv_f) = gu_squared_terms(a, f)?;
    let num = is_perfect_square(&q.numer().to_biguint().expect("q >= 0"));
    let den = is_perfect_square(&q.denom().to_biguint().expect("den > 0"));
    Ok(match (num, den) {
        (Some(n), Some(d)) => Some(inv_f + rat(n, d)),
        _ => None,
    })
}
