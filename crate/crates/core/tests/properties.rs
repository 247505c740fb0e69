use proptest::prelude::*;

use charsum::characters::Character;
use charsum::evaluator::{evaluate, normalize, Normalized};
use charsum::oracle::{brute_force, brute_force_sharded};
use charsum::ring2adic::{dlog5, inv_mod2w, mask, pow_mod2w, v2};
use charsum::sweep::magnitude_consistent;
use charsum::{SumInstance, SumProblem};

fn problem(max_m: u32) -> impl Strategy<Value = SumProblem> {
    (3..=max_m).prop_flat_map(|m| {
        let modulus = 1u64 << m;
        let q = 1u64 << (m - 2);
        (
            Just(m),
            0..modulus,
            0..modulus,
            1..=24u64,
            1..=q,
            prop::bool::ANY,
            1..=q,
            prop::bool::ANY,
        )
            .prop_map(|(m, a, b, k, c1, s1, c2, s2)| {
                let sign = |s: bool| if s { 1 } else { -1 };
                SumProblem::new(
                    SumInstance::new(m, a, b, k).unwrap(),
                    Character::new(m, c1, sign(s1)).unwrap(),
                    Character::new(m, c2, sign(s2)).unwrap(),
                )
                .unwrap()
            })
    })
}

// Problems with A even, B odd and chi2 primitive, which reach the regime formulas.
fn standard_problem(max_m: u32) -> impl Strategy<Value = SumProblem> {
    problem(max_m).prop_map(|p| {
        let m = p.m();
        let inst = SumInstance::new(m, p.instance.a() & !1, p.instance.b() | 1, p.instance.k()).unwrap();
        let c2 = p.chi2.c() - (1 - p.chi2.c() % 2);
        let chi2 = Character::new(m, c2, p.chi2.sign() as i64).unwrap();
        SumProblem::new(inst, p.chi1, chi2).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn closed_form_equals_oracle(p in problem(11)) {
        let cf = evaluate(&p).unwrap();
        prop_assert_eq!(&cf.value, &brute_force(&p), "{:?} {}", p, cf.case);
        prop_assert!(magnitude_consistent(&cf));
    }

    #[test]
    fn standing_hypotheses_equal_oracle(p in standard_problem(13)) {
        prop_assert!(matches!(normalize(&p).unwrap(), Normalized::Standard(_)));
        prop_assert_eq!(evaluate(&p).unwrap().value, brute_force(&p));
    }

    #[test]
    fn zero_tag_iff_zero_value(p in problem(10)) {
        let cf = evaluate(&p).unwrap();
        prop_assert_eq!(cf.case.is_zero_case(), cf.value.is_zero());
        prop_assert_eq!(cf.magnitude_halves.is_none(), cf.value.is_zero());
    }

    #[test]
    fn conjugate_characters_conjugate_the_sum(p in problem(9)) {
        let q = SumProblem::new(p.instance, p.chi1.conj(), p.chi2.conj()).unwrap();
        prop_assert_eq!(evaluate(&q).unwrap().value, evaluate(&p).unwrap().value.conj());
    }

    #[test]
    fn sharded_oracle_matches(p in problem(10), shards in 1usize..40) {
        prop_assert_eq!(brute_force_sharded(&p, shards), brute_force(&p));
    }

    #[test]
    fn dlog5_round_trip(m in 3u32..=30, x in any::<u64>()) {
        let x = (x & mask(m)) | 1;
        let (eps, gamma) = dlog5(x, m).unwrap();
        let y = pow_mod2w(5, gamma, m);
        let y = if eps == 1 { y.wrapping_neg() & mask(m) } else { y };
        prop_assert_eq!(y, x);
        prop_assert!(gamma < 1 << (m - 2));
    }

    #[test]
    fn inverse_mod_power_of_two(w in 1u32..=64, y in any::<u64>()) {
        let y = (y & mask(w)) | 1;
        let z = inv_mod2w(y, w).unwrap();
        prop_assert_eq!(y.wrapping_mul(z) & mask(w), 1);
    }

    #[test]
    fn valuation_splits(x in 1u64..) {
        let v = v2(x).unwrap();
        prop_assert_eq!((x >> v) & 1, 1);
        prop_assert_eq!((x >> v) << v, x);
    }
}
