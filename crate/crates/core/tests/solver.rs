use expdioph::solver::*;
use num_integer::Integer;
use proptest::prelude::*;

/// Triple loop over all exponents with u128 arithmetic.
fn oracle(a: u64, b: u64, c: u64, h: u128) -> Vec<ExpSolution> {
    let powers = |base: u64| -> Vec<u128> {
        let mut v = Vec::new();
        let mut p = base as u128;
        while p <= h {
            v.push(p);
            p *= base as u128;
        }
        v
    };
    let (pa, pb, pc) = (powers(a), powers(b), powers(c));
    let mut out = Vec::new();
    for (z, cz) in pc.iter().enumerate() {
        for (x, ax) in pa.iter().enumerate() {
            for (y, by) in pb.iter().enumerate() {
                if ax + by == *cz {
                    out.push(ExpSolution::new(x as u64 + 1, y as u64 + 1, z as u64 + 1));
                }
            }
        }
    }
    out.sort();
    out
}

fn coprime(a: u64, b: u64, c: u64) -> bool {
    a.gcd(&b) == 1 && a.gcd(&c) == 1 && b.gcd(&c) == 1
}

const SIEVE: [u64; 6] = [3, 4, 5, 7, 8, 9];

#[test]
fn complete_within_bound_for_small_bases() {
    let h = 10u128.pow(12);
    let bound = HeightBound::from_u64(h as u64).unwrap();
    let sieve = SolverOptions {
        sieve_moduli: SIEVE.to_vec(),
    };
    for a in 2..=10 {
        for b in 2..=10 {
            for c in 2..=10 {
                if !coprime(a, b, c) {
                    continue;
                }
                let t = Triple::from_u64(a, b, c).unwrap();
                let want = oracle(a, b, c, h);
                assert_eq!(enumerate_solutions(&t, &bound).unwrap(), want, "({a},{b},{c})");
                assert_eq!(
                    enumerate_solutions_with(&t, &bound, &sieve).unwrap(),
                    want,
                    "sieved ({a},{b},{c})"
                );
                assert_eq!(count_solutions(&t, &bound).unwrap(), want.len());
                assert_eq!(has_multiple_solutions(&t, &bound).unwrap(), want.len() >= 2);
            }
        }
    }
}

#[test]
fn sieve_is_conservative_on_wider_range() {
    let bound = HeightBound::from_u64(10u64.pow(9)).unwrap();
    let sieve = SolverOptions {
        sieve_moduli: vec![3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 32],
    };
    for a in 2..=30u64 {
        for b in 2..=30u64 {
            for c in [2u64, 3, 5, 7, 11, 13, 17] {
                if !coprime(a, b, c) {
                    continue;
                }
                let t = Triple::from_u64(a, b, c).unwrap();
                assert_eq!(
                    enumerate_solutions_with(&t, &bound, &sieve).unwrap(),
                    enumerate_solutions(&t, &bound).unwrap(),
                    "({a},{b},{c})"
                );
            }
        }
    }
}

#[test]
fn parity_when_c_even() {
    let bound = HeightBound::from_u64(10u64.pow(9)).unwrap();
    for a in (3..=41u64).step_by(2) {
        for b in (3..=41u64).step_by(2) {
            for c in [2u64, 4, 8, 14, 16] {
                if !coprime(a, b, c) {
                    continue;
                }
                let t = Triple::from_u64(a, b, c).unwrap();
                for s in enumerate_solutions(&t, &bound).unwrap() {
                    assert!(a.pow(s.x as u32) % 2 == 1 && b.pow(s.y as u32) % 2 == 1);
                }
            }
        }
    }
}

fn coprime_triple() -> impl Strategy<Value = (u64, u64, u64)> {
    (2u64..40, 2u64..40, 2u64..40).prop_filter("pairwise coprime", |&(a, b, c)| coprime(a, b, c))
}

proptest! {
    #[test]
    fn swapping_a_and_b_swaps_exponents((a, b, c) in coprime_triple(), k in 1u32..12) {
        let h = HeightBound::new(num_bigint::BigUint::from(c).pow(k) + 7u32).unwrap();
        let t = Triple::from_u64(a, b, c).unwrap();
        let mut swapped: Vec<_> = enumerate_solutions(&t.swapped(), &h)
            .unwrap()
            .into_iter()
            .map(|s| s.swapped())
            .collect();
        swapped.sort();
        prop_assert_eq!(enumerate_solutions(&t, &h).unwrap(), swapped);
    }

    #[test]
    fn larger_bound_keeps_smaller_results((a, b, c) in coprime_triple(), k in 1u32..10, extra in 0u32..6) {
        let t = Triple::from_u64(a, b, c).unwrap();
        let small = HeightBound::new(num_bigint::BigUint::from(c).pow(k)).unwrap();
        let large = HeightBound::new(num_bigint::BigUint::from(c).pow(k + extra) * 3u32).unwrap();
        let lo = enumerate_solutions(&t, &small).unwrap();
        let hi = enumerate_solutions(&t, &large).unwrap();
        let cz = |s: &ExpSolution| num_bigint::BigUint::from(c).pow(s.z as u32);
        let prefix: Vec<_> = hi.iter().filter(|s| cz(s) <= *small.value()).copied().collect();
        prop_assert_eq!(lo, prefix);
    }

    #[test]
    fn every_solution_checks_out((a, b, c) in coprime_triple()) {
        let t = Triple::from_u64(a, b, c).unwrap();
        let h = HeightBound::from_u64(10u64.pow(15)).unwrap();
        for s in enumerate_solutions(&t, &h).unwrap() {
            let lhs = (a as u128).pow(s.x as u32) + (b as u128).pow(s.y as u32);
            prop_assert_eq!(lhs, (c as u128).pow(s.z as u32));
        }
    }
}
