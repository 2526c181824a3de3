use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

use ulam_core::bounds::{
    binomial, binomial_signed, ceil_pow2_exponent, falling_factorial, intersection_bound_sum,
    intersection_bound_term, theorem1_bound,
};
use ulam_core::{ulam_distance, ulam_distance_oracle, Permutation, SymbolSet};

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((1..=n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_one_line(&v).unwrap())
}

fn pair(max_n: usize) -> impl Strategy<Value = (Permutation, Permutation)> {
    (1..=max_n).prop_flat_map(|n| (perm(n), perm(n)))
}

fn triple(max_n: usize) -> impl Strategy<Value = (Permutation, Permutation, Permutation)> {
    (1..=max_n).prop_flat_map(|n| (perm(n), perm(n), perm(n)))
}

fn product(factors: &[BigUint]) -> BigUint {
    factors.iter().fold(BigUint::one(), |acc, f| acc * f)
}

proptest! {
    #[test]
    fn triangle_inequality((a, b, c) in triple(14)) {
        let ab = ulam_distance(&a, &b).unwrap();
        let bc = ulam_distance(&b, &c).unwrap();
        prop_assert!(ulam_distance(&a, &c).unwrap() <= ab + bc);
        prop_assert_eq!(ab, ulam_distance(&b, &a).unwrap());
    }

    #[test]
    fn fast_distance_equals_oracle((a, b) in pair(10)) {
        prop_assert_eq!(ulam_distance(&a, &b).unwrap(), ulam_distance_oracle(&a, &b).unwrap());
    }

    #[test]
    fn relabel_invariance((s, a, b) in triple(20)) {
        prop_assert_eq!(
            ulam_distance(&s.relabel(&a).unwrap(), &s.relabel(&b).unwrap()).unwrap(),
            ulam_distance(&a, &b).unwrap()
        );
    }

    #[test]
    fn text_round_trip(p in (0usize..30).prop_flat_map(perm)) {
        let text = p.to_string();
        prop_assert_eq!(text.parse::<Permutation>().unwrap(), p.clone());
        let spaced = text.replace(',', " ");
        prop_assert_eq!(spaced.parse::<Permutation>().unwrap(), p);
    }

    #[test]
    fn rank_round_trip(p in (0usize..25).prop_flat_map(perm)) {
        let r = p.rank();
        prop_assert!(r < falling_factorial(p.n() as u64, p.n() as u64).unwrap());
        prop_assert_eq!(Permutation::unrank(p.n(), &r).unwrap(), p);
    }

    #[test]
    fn deletion_then_distance(a in (1usize..10).prop_flat_map(perm), mask in any::<u16>()) {
        let n = a.n();
        let symbols: Vec<usize> = (1..=n).filter(|i| mask >> (i - 1) & 1 == 1).collect();
        let set = SymbolSet::from_symbols(n, &symbols).unwrap();
        // Any permutation agreeing with `a` off the deleted set is within |set| of it.
        let mut rest = a.delete(&set).unwrap().symbols();
        rest.extend(symbols.iter().copied());
        let b = Permutation::from_one_line(&rest).unwrap();
        prop_assert!(ulam_distance(&a, &b).unwrap() <= symbols.len());
    }

    #[test]
    fn falling_factorial_ignores_factor_order(n in 0u64..60, k in 0u64..60, seed in any::<u64>()) {
        let k = k.min(n);
        let mut factors: Vec<BigUint> = (n - k + 1..=n).map(BigUint::from).collect();
        let rotate = (seed as usize) % factors.len().max(1);
        factors.rotate_left(rotate);
        factors.reverse();
        prop_assert_eq!(product(&factors), falling_factorial(n, k).unwrap());
        prop_assert_eq!(
            falling_factorial(n, k).unwrap(),
            binomial(n, k) * falling_factorial(k, k).unwrap()
        );
    }

    #[test]
    fn binomial_identities(n in 0u64..80, k in 0u64..80) {
        prop_assert_eq!(binomial(n, k), if k <= n { binomial(n, n - k) } else { BigUint::zero() });
        if n > 0 && k > 0 {
            prop_assert_eq!(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
        }
        prop_assert_eq!(binomial_signed(n as i64, k as i64 - 80), BigUint::zero());
    }

    #[test]
    fn intersection_terms_in_any_order(n in 1u64..40, k in 0u64..20) {
        let k = k.min(n);
        let (ni, ki) = (n as i64, k as i64);
        let mut expected = BigUint::zero();
        for lambda in (k..=2 * k).rev() {
            let l = lambda as i64;
            let common = 2 * ki - l;
            let placements = if common > ni {
                BigUint::zero()
            } else {
                falling_factorial(n, common as u64).unwrap()
            };
            let factors = [
                placements,
                binomial_signed(2 * (l - ki), l - ki),
                binomial_signed(ki, common),
                binomial_signed(l, ki),
                binomial_signed(ni - ki, l - ki),
                BigUint::one() << k as usize,
            ];
            let term = product(&factors);
            prop_assert_eq!(&term, &intersection_bound_term(n, k, lambda));
            expected += term;
        }
        prop_assert_eq!(expected, intersection_bound_sum(n, k).unwrap());
    }

    #[test]
    fn power_ceiling_brackets_float_estimate(k in 0u64..40, num in 0u32..8, den in 1u32..5) {
        let c = Ratio::new(BigUint::from(num), BigUint::from(den));
        let exponent = k as f64 + num as f64 / den as f64 * (k as f64).powf(2.0 / 3.0);
        let approx = exponent.exp2();
        let got = ceil_pow2_exponent(k, &c).to_f64().unwrap();
        prop_assert!(got >= approx * (1.0 - 1e-12));
        prop_assert!(got < approx + 1.0 + approx * 1e-12);
    }

    #[test]
    fn theorem_bound_grows_with_constant(n in 1u64..20, k in 0u64..20, c in 0u32..6) {
        let k = k.min(n);
        let low = theorem1_bound(n, k, &Ratio::from_integer(BigUint::from(c))).unwrap();
        let high = theorem1_bound(n, k, &Ratio::from_integer(BigUint::from(c + 1))).unwrap();
        prop_assert!(low <= high);
        prop_assert!(low >= falling_factorial(n, k).unwrap() << k as usize);
    }
}
