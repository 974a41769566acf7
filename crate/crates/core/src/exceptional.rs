//! The known exceptional triples with more than one solution, and their
//! verification by direct search.

use num_traits::{One, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{nat, Nat};
use crate::error::{Error, Result};
use crate::solver::{enumerate_solutions, ExpSolution, HeightBound, Triple};

/// The twelve isolated exceptional triples.
pub const SPORADIC: [(u64, u64, u64); 12] = [
    (3, 5, 2),
    (3, 13, 2),
    (2, 5, 3),
    (2, 7, 3),
    (2, 3, 11),
    (3, 10, 13),
    (2, 3, 35),
    (2, 89, 91),
    (2, 5, 133),
    (2, 3, 259),
    (3, 13, 2200),
    (2, 91, 8283),
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    Sporadic,
    /// `(2, 2^r - 1, 2^r + 1)`.
    Family { r: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExceptionalEntry {
    pub triple: Triple,
    pub kind: EntryKind,
    /// Solutions found by search; at least two once verified.
    pub witnesses: Vec<ExpSolution>,
    /// Bound the witnesses were searched under.
    pub height: Option<HeightBound>,
}

impl ExceptionalEntry {
    pub fn sporadic(index: usize) -> Result<Self> {
        let &(a, b, c) = SPORADIC
            .get(index)
            .ok_or_else(|| Error::invalid(format!("no sporadic triple at index {index}")))?;
        Ok(ExceptionalEntry {
            triple: Triple::from_u64(a, b, c)?,
            kind: EntryKind::Sporadic,
            witnesses: Vec::new(),
            height: None,
        })
    }

    pub fn family(r: u32) -> Result<Self> {
        Ok(ExceptionalEntry {
            triple: family_triple(r)?,
            kind: EntryKind::Family { r },
            witnesses: Vec::new(),
            height: None,
        })
    }
}

fn check_family_r(r: u32) -> Result<()> {
    if r == 2 || r >= 4 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "family parameter must satisfy r = 2 or r >= 4, got {r}"
        )))
    }
}

/// `(2, 2^r - 1, 2^r + 1)`.
pub fn family_triple(r: u32) -> Result<Triple> {
    check_family_r(r)?;
    let p = Nat::one() << r;
    Triple::new(nat(2), &p - 1u32, &p + 1u32)
}

/// `(1, 1, 1)` and `(r + 2, 2, 2)`, each checked by exact evaluation.
pub fn family_solutions(r: u32) -> Result<(ExpSolution, ExpSolution)> {
    let t = family_triple(r)?;
    let pair = (
        ExpSolution::new(1, 1, 1),
        ExpSolution::new(u64::from(r) + 2, 2, 2),
    );
    for s in [pair.0, pair.1] {
        if !s.holds(&t) {
            return Err(Error::Assertion(format!("{s:?} does not solve {t}")));
        }
    }
    Ok(pair)
}

/// Re-runs the search under `h` and keeps every solution as a witness.
pub fn verify_exceptional(e: &ExceptionalEntry, h: &HeightBound) -> Result<ExceptionalEntry> {
    let found = if h.value() < e.triple.c() {
        Vec::new()
    } else {
        enumerate_solutions(&e.triple, h)?
    };
    if found.len() < 2 {
        return Err(Error::VerificationFailed {
            a: e.triple.a().to_string(),
            b: e.triple.b().to_string(),
            c: e.triple.c().to_string(),
            height: h.to_string(),
            found: found.len(),
        });
    }
    Ok(ExceptionalEntry {
        triple: e.triple.clone(),
        kind: e.kind,
        witnesses: found,
        height: Some(h.clone()),
    })
}

/// How the search bound for each entry is chosen.
#[derive(Clone, Debug)]
pub enum HeightPolicy {
    /// Start at `max(c^3, 10^8)` and double while fewer than two
    /// solutions appear, never exceeding `cap`.
    Auto { cap: Nat },
    Fixed(HeightBound),
}

impl Default for HeightPolicy {
    fn default() -> Self {
        HeightPolicy::Auto {
            cap: Nat::one() << 128u32,
        }
    }
}

/// `max(c^3, 10^8)`.
pub fn default_height(t: &Triple) -> HeightBound {
    let cube = t.c().pow(3u32);
    let floor = nat(100_000_000);
    HeightBound::new(cube.max(floor)).expect("bound is at least 10^8")
}

fn verify_with_policy(e: &ExceptionalEntry, policy: &HeightPolicy) -> Result<ExceptionalEntry> {
    match policy {
        HeightPolicy::Fixed(h) => verify_exceptional(e, h),
        HeightPolicy::Auto { cap } => {
            let mut h = default_height(&e.triple);
            loop {
                match verify_exceptional(e, &h) {
                    Err(Error::VerificationFailed { .. }) if h.value() * 2u32 <= *cap => {
                        h = HeightBound::new(h.value() * 2u32)?;
                    }
                    other => return other,
                }
            }
        }
    }
}

/// The sporadic triples plus the family for `r = 2` and `4 <= r <= r_max`,
/// verified under the default automatic bound.
pub fn exceptional_set(r_max: u32) -> Result<Vec<ExceptionalEntry>> {
    exceptional_set_with(r_max, &HeightPolicy::default())
}

pub fn exceptional_set_with(r_max: u32, policy: &HeightPolicy) -> Result<Vec<ExceptionalEntry>> {
    if r_max < 2 {
        return Err(Error::invalid(format!("r_max must be >= 2, got {r_max}")));
    }
    let mut entries = (0..SPORADIC.len())
        .map(ExceptionalEntry::sporadic)
        .collect::<Result<Vec<_>>>()?;
    for r in std::iter::once(2).chain(4..=r_max) {
        entries.push(ExceptionalEntry::family(r)?);
    }
    let results: Vec<Result<ExceptionalEntry>> = entries
        .par_iter()
        .map(|e| verify_with_policy(e, policy))
        .collect();
    // first failure in list order, whatever the scheduling
    results.into_iter().collect()
}

/// Membership of `(a, b, c)` or `(b, a, c)` in the exceptional set.
pub fn is_exceptional(t: &Triple) -> bool {
    let key = |t: &Triple| -> Option<(u64, u64, u64)> {
        Some((t.a().to_u64()?, t.b().to_u64()?, t.c().to_u64()?))
    };
    let swapped = t.swapped();
    if [t, &swapped]
        .iter()
        .any(|u| key(u).is_some_and(|k| SPORADIC.contains(&k)))
    {
        return true;
    }
    [t, &swapped].iter().any(|u| in_family(u))
}

fn in_family(t: &Triple) -> bool {
    if *t.a() != nat(2) || *t.c() != t.b() + 2u32 {
        return false;
    }
    let p = t.b() + 1u32;
    if p.count_ones() != 1 {
        return false;
    }
    let r = p.trailing_zeros().unwrap_or(0);
    r == 2 || r >= 4
}
