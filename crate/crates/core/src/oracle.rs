//! Direct summation. Every term is a product of two roots of unity, so it is
//! accumulated as a single `+-1` on one coefficient; no ring multiplication is
//! performed.

use rayon::prelude::*;

use crate::cyclotomic::{ring_exponent_for, CycInt};
use crate::instance::SumProblem;
use crate::ring2adic::{dlog5, pow_mod2w};

/// `sum_{x=1}^{2^m} chi1(x) chi2(A x^k + B)`.
pub fn brute_force(p: &SumProblem) -> CycInt {
    let m = p.m();
    let mut acc = CycInt::zero(ring_exponent_for(m));
    accumulate_range(p, 0, 1u64 << (m - 1), &mut acc);
    acc
}

/// Same value as [`brute_force`], summed over `shards` disjoint ranges in
/// parallel. Integer accumulation makes the result independent of sharding.
pub fn brute_force_sharded(p: &SumProblem, shards: usize) -> CycInt {
    let m = p.m();
    let r = ring_exponent_for(m);
    let total = 1u64 << (m - 1);
    let shards = (shards.max(1) as u64).min(total);
    let step = total.div_ceil(shards);
    (0..shards)
        .into_par_iter()
        .map(|i| {
            let mut acc = CycInt::zero(r);
            accumulate_range(p, i * step, ((i + 1) * step).min(total), &mut acc);
            acc
        })
        .reduce(|| CycInt::zero(r), |a, b| &a + &b)
}

// Odd x = 2i + 1 for i in [lo, hi).
fn accumulate_range(p: &SumProblem, lo: u64, hi: u64, acc: &mut CycInt) {
    let r = acc.ring_exponent();
    let inst = &p.instance;
    for i in lo..hi {
        let x = 2 * i + 1;
        let y = inst.poly(x);
        if y & 1 == 0 {
            continue;
        }
        let e1 = p.chi1.exponent(x, r).expect("x is odd");
        let e2 = p.chi2.exponent(y, r).expect("y is odd");
        acc.add_root(e1 + e2, 1);
    }
}

/// `S(sigma A) = sum_{gamma=1}^{2^(m-2)} chi1(5^gamma) chi2(sigma A 5^(gamma k) + B)`.
pub fn half_sum(p: &SumProblem, negate_a: bool) -> CycInt {
    let m = p.m();
    let r = ring_exponent_for(m);
    let mk = p.instance.modulus_mask();
    let inst = if negate_a {
        p.instance.negate_a()
    } else {
        p.instance
    };
    let step = pow_mod2w(5, inst.k(), m);
    let mut acc = CycInt::zero(r);
    let mut five_gamma_k = 1u64;
    for gamma in 1..=1u64 << (m - 2) {
        five_gamma_k = five_gamma_k.wrapping_mul(step) & mk;
        let y = inst.a().wrapping_mul(five_gamma_k).wrapping_add(inst.b()) & mk;
        if y & 1 == 0 {
            continue;
        }
        let e1 = p.chi1.exponent_from_log(0, gamma, r);
        let (eps, g) = dlog5(y, m).expect("y is odd");
        let e2 = p.chi2.exponent_from_log(eps, g, r);
        acc.add_root(e1 + e2, 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::characters::Character;
    use crate::instance::SumInstance;

    fn problem(m: u32, a: i64, b: i64, k: u64, c1: u64, s1: i64, c2: u64, s2: i64) -> SumProblem {
        SumProblem::from_params(m, a, b, k, c1, s1, c2, s2).unwrap()
    }

    #[test]
    fn same_parity_vanishes() {
        assert!(brute_force(&problem(6, 1, 3, 2, 1, 1, 3, 1)).is_zero());
        assert!(brute_force(&problem(6, 2, 4, 3, 5, -1, 3, 1)).is_zero());
    }

    #[test]
    fn tiny_regime_with_principal_chi1() {
        // m = 4, A = 8, k = 4: A x^k + B = A + B for every odd x.
        let chi2 = Character::new(4, 1, -1).unwrap();
        let inst = SumInstance::new(4, 8, 1, 4).unwrap();
        let p = SumProblem::new(inst, Character::principal(4).unwrap(), chi2).unwrap();
        let expect = chi2.eval(9, 3).unwrap().scale(8);
        assert_eq!(brute_force(&p), expect);
        assert_eq!(half_sum(&p, false), chi2.eval(9, 3).unwrap().scale(4));
    }

    #[test]
    fn worked_large_instance() {
        // m = 7, A = 2, B = 1, k = 1, c1 = 2, c2 = 1: S = 16 chi2(3).
        let p = problem(7, 2, 1, 1, 2, 1, 1, 1);
        let expect = p.chi2.eval(3, 5).unwrap().scale(16);
        assert_eq!(brute_force(&p), expect);
    }

    #[test]
    fn sharding_is_bit_identical() {
        let p = problem(11, 6, 5, 3, 12, -1, 7, 1);
        let serial = brute_force(&p);
        for shards in [1, 2, 3, 7, 64, 5000] {
            assert_eq!(brute_force_sharded(&p, shards), serial);
        }
    }

    #[test]
    fn decomposition_identities() {
        for (a, b, k, c1, s1, c2, s2) in [
            (2, 1, 1, 2, 1, 1, 1),
            (6, 3, 2, 4, 1, 3, -1),
            (12, 7, 3, 5, -1, 9, 1),
            (4, 9, 4, 8, 1, 11, -1),
            (10, 5, 6, 6, -1, 5, 1),
        ] {
            let p = problem(8, a, b, k, c1, s1, c2, s2);
            let s = brute_force(&p);
            let plus = half_sum(&p, false);
            let expect = if k % 2 == 0 {
                plus.scale(1 + p.chi1.sign() as i64)
            } else {
                &plus + &half_sum(&p, true).scale(p.chi1.sign() as i64)
            };
            assert_eq!(s, expect, "{p:?}");
        }
    }

    #[test]
    fn imprimitive_chi2_with_primitive_chi1_vanishes() {
        for m in 3..=7 {
            let q = 1u64 << (m - 2);
            for c1 in (1..=q).step_by(2) {
                for c2 in (2..=q).step_by(2) {
                    for k in [1, 2, 3] {
                        let p = problem(m, 2, 1, k, c1, -1, c2, 1);
                        assert!(brute_force(&p).is_zero());
                    }
                }
            }
        }
    }
}
