//! Enumeration of solutions `(x, y, z)` of `a^x + b^y = c^z` under a height
//! bound on `c^z`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::ControlFlow;

use num_integer::Integer;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, nat, pow_of_base, Nat};
use crate::error::{Error, Result};

/// Pairwise coprime bases `(a, b, c)`, each at least 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    a: Nat,
    b: Nat,
    c: Nat,
}

impl Triple {
    pub fn new(a: Nat, b: Nat, c: Nat) -> Result<Self> {
        let two = nat(2);
        if a < two || b < two || c < two {
            return Err(Error::invalid(format!(
                "bases must all be >= 2, got ({a}, {b}, {c})"
            )));
        }
        for (p, q) in [(&a, &b), (&a, &c), (&b, &c)] {
            if !gcd(p, q).is_one() {
                return Err(Error::invalid(format!(
                    "bases ({a}, {b}, {c}) are not pairwise coprime: gcd({p}, {q}) = {}",
                    gcd(p, q)
                )));
            }
        }
        Ok(Triple { a, b, c })
    }

    pub fn from_u64(a: u64, b: u64, c: u64) -> Result<Self> {
        Triple::new(nat(a), nat(b), nat(c))
    }

    pub fn a(&self) -> &Nat {
        &self.a
    }

    pub fn b(&self) -> &Nat {
        &self.b
    }

    pub fn c(&self) -> &Nat {
        &self.c
    }

    /// `(b, a, c)`.
    pub fn swapped(&self) -> Triple {
        Triple {
            a: self.b.clone(),
            b: self.a.clone(),
            c: self.c.clone(),
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.a, self.b, self.c)
    }
}

/// Exponents `(x, y, z)`, all positive. Ordered by `(z, x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExpSolution {
    pub x: u64,
    pub y: u64,
    pub z: u64,
}

impl ExpSolution {
    pub fn new(x: u64, y: u64, z: u64) -> Self {
        ExpSolution { x, y, z }
    }

    /// Evaluates `a^x + b^y == c^z` from scratch.
    pub fn holds(&self, t: &Triple) -> bool {
        if self.x == 0 || self.y == 0 || self.z == 0 {
            return false;
        }
        let (Ok(x), Ok(y), Ok(z)) = (
            u32::try_from(self.x),
            u32::try_from(self.y),
            u32::try_from(self.z),
        ) else {
            return false;
        };
        t.a.pow(x) + t.b.pow(y) == t.c.pow(z)
    }

    /// The same solution read against the swapped triple `(b, a, c)`.
    pub fn swapped(&self) -> ExpSolution {
        ExpSolution::new(self.y, self.x, self.z)
    }

    pub fn as_array(&self) -> [u64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Ord for ExpSolution {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.z, self.x, self.y).cmp(&(other.z, other.x, other.y))
    }
}

impl PartialOrd for ExpSolution {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Upper bound on the common value `c^z`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HeightBound(Nat);

impl HeightBound {
    pub fn new(h: Nat) -> Result<Self> {
        if h < nat(2) {
            return Err(Error::invalid(format!("height bound must be >= 2, got {h}")));
        }
        Ok(HeightBound(h))
    }

    pub fn from_u64(h: u64) -> Result<Self> {
        HeightBound::new(nat(h))
    }

    /// `base^exp`.
    pub fn power(base: u64, exp: u32) -> Result<Self> {
        HeightBound::new(nat(base).pow(exp))
    }

    pub fn value(&self) -> &Nat {
        &self.0
    }

    fn check_against(&self, t: &Triple) -> Result<()> {
        if self.0 < t.c {
            return Err(Error::invalid(format!(
                "height bound {} is below c = {}; the search space would be empty",
                self.0, t.c
            )));
        }
        Ok(())
    }
}

impl Serialize for HeightBound {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        crate::serde_dec::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for HeightBound {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let h: Nat = crate::serde_dec::deserialize(d)?;
        HeightBound::new(h).map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for HeightBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Search tuning. Results never depend on these settings.
#[derive(Clone, Debug, Default)]
pub struct SolverOptions {
    /// Small moduli for the residue pre-sieve; empty disables it.
    pub sieve_moduli: Vec<u64>,
}

/// Rejects `(x, z)` when `c^z - a^x` misses every residue `b^y` modulo some
/// sieve modulus.
struct ResidueSieve {
    layers: Vec<SieveLayer>,
}

struct SieveLayer {
    modulus: u64,
    a: u64,
    c: u64,
    b_powers: Vec<bool>,
}

impl ResidueSieve {
    fn new(t: &Triple, moduli: &[u64]) -> Self {
        let layers = moduli
            .iter()
            .filter(|&&m| m >= 2)
            .map(|&m| {
                let reduce = |v: &Nat| u64::try_from(v % m).expect("residue fits in u64");
                let b = reduce(&t.b);
                // b^y mod m for y >= 1 is eventually periodic; walk until a repeat
                let mut b_powers = vec![false; m as usize];
                let mut v = b;
                while !b_powers[v as usize] {
                    b_powers[v as usize] = true;
                    v = mul_mod(v, b, m);
                }
                SieveLayer {
                    modulus: m,
                    a: reduce(&t.a),
                    c: reduce(&t.c),
                    b_powers,
                }
            })
            .collect();
        ResidueSieve { layers }
    }

    fn admits(&self, x: u64, z: u64) -> bool {
        self.layers.iter().all(|l| {
            let m = l.modulus;
            let diff = (pow_mod(l.c, z, m) + m - pow_mod(l.a, x, m)) % m;
            l.b_powers[diff as usize]
        })
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Walks `z` upward while `c^z <= H`, and for each `z` every `x` with
/// `a^x < c^z`, testing whether `c^z - a^x` is a positive power of `b`.
fn search<F>(t: &Triple, h: &HeightBound, opts: &SolverOptions, mut visit: F) -> Result<()>
where
    F: FnMut(ExpSolution) -> ControlFlow<()>,
{
    h.check_against(t)?;
    let sieve = ResidueSieve::new(t, &opts.sieve_moduli);
    let mut cz = t.c.clone();
    let mut z = 1u64;
    while cz <= h.0 {
        let mut ax = t.a.clone();
        let mut x = 1u64;
        while ax < cz {
            if sieve.admits(x, z) {
                let rest = &cz - &ax;
                if rest.is_multiple_of(&t.b) {
                    if let Some(y) = pow_of_base(&rest, &t.b)? {
                        let sol = ExpSolution::new(x, y, z);
                        if !sol.holds(t) {
                            return Err(Error::Assertion(format!(
                                "re-evaluation rejected {sol:?} for {t}"
                            )));
                        }
                        if visit(sol).is_break() {
                            return Ok(());
                        }
                    }
                }
            }
            ax *= &t.a;
            x += 1;
        }
        cz *= &t.c;
        z += 1;
    }
    Ok(())
}

/// All solutions with `c^z <= H`, sorted by `(z, x, y)`.
pub fn enumerate_solutions(t: &Triple, h: &HeightBound) -> Result<Vec<ExpSolution>> {
    enumerate_solutions_with(t, h, &SolverOptions::default())
}

pub fn enumerate_solutions_with(
    t: &Triple,
    h: &HeightBound,
    opts: &SolverOptions,
) -> Result<Vec<ExpSolution>> {
    let mut out = Vec::new();
    search(t, h, opts, |s| {
        out.push(s);
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// `N_H(a, b, c)`.
pub fn count_solutions(t: &Triple, h: &HeightBound) -> Result<usize> {
    let mut n = 0;
    search(t, h, &SolverOptions::default(), |_| {
        n += 1;
        ControlFlow::Continue(())
    })?;
    Ok(n)
}

/// Stops as soon as a second solution turns up.
pub fn has_multiple_solutions(t: &Triple, h: &HeightBound) -> Result<bool> {
    let mut n = 0;
    search(t, h, &SolverOptions::default(), |_| {
        n += 1;
        if n >= 2 {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(n >= 2)
}
