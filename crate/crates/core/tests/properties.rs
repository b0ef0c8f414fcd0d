//! Randomized property suites: ring laws for the exact carriers, the
//! classical q-function functional equations, shift coherence of the
//! lattice sums, and completeness of the pruned partition generator.

use std::collections::BTreeSet;

use proptest::prelude::*;

use qfold::exactalg::{LaurentPoly, Monomial, Var};
use qfold::multisum::{evaluate, mod14_spec, shift, ShiftRule};
use qfold::partitions::{admits, enumerate_base, subset_predicate, Partition, SetName};
use qfold::qseries::{pochhammer, theta, TruncatedSeries};

fn poly_strategy() -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec(
        (-5i64..=5, -3i64..=3, -3i64..=3, -6i64..=6),
        0..6,
    )
    .prop_map(|terms| LaurentPoly::from_terms(&terms))
}

fn series_strategy() -> impl Strategy<Value = TruncatedSeries> {
    (poly_strategy(), 5i64..=25).prop_map(|(p, order)| TruncatedSeries::exact(&p).truncate_to(order))
}

proptest! {
    #[test]
    fn poly_ring_laws(a in poly_strategy(), b in poly_strategy(), c in poly_strategy()) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.add(&b).mul(&c), a.mul(&c).add(&b.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        prop_assert_eq!(a.neg().neg(), a);
    }

    #[test]
    fn series_ring_laws(a in series_strategy(), b in series_strategy(), c in series_strategy()) {
        prop_assert!(a.mul(&b).agrees_with(&b.mul(&a)));
        prop_assert!(a.add(&b).add(&c).agrees_with(&a.add(&b.add(&c))));
        prop_assert!(a.add(&b).mul(&c).agrees_with(&a.mul(&c).add(&b.mul(&c))));
        prop_assert!(a.sub(&a).valuation().is_none());
    }

    #[test]
    fn series_truncation_is_coherent(a in series_strategy(), b in series_strategy(), k in 3i64..=12) {
        // Multiplying then truncating equals truncating then multiplying.
        let full = a.mul(&b).truncate_to(k);
        let cut = a.truncate_to(k).mul(&b.truncate_to(k));
        prop_assert!(full.agrees_with(&cut));
    }

    #[test]
    fn unit_series_invert_round_trip(tail in poly_strategy(), order in 8i64..=30) {
        // 1 + q^7 * tail is a unit whenever its q-valuation is positive.
        let shifted = tail.mul(&LaurentPoly::from_terms(&[(1, 0, 0, 7)]));
        let unit = LaurentPoly::one().add(&shifted);
        let s = TruncatedSeries::exact(&unit).truncate_to(order);
        let inv = s.invert();
        prop_assume!(inv.is_ok());
        let one = TruncatedSeries::exact_one().truncate_to(order);
        prop_assert!(s.mul(&inv.unwrap()).agrees_with(&one));
    }

    #[test]
    fn pochhammer_recurrence(
        sign in prop::bool::ANY,
        aexp in 1i64..=5,
        bexp in 1i64..=4,
        n in 0u64..=10,
    ) {
        // (a; b)_(n+1) = (a; b)_n * (1 - a b^n)
        let a = Monomial::q_pow_int(if sign { 1 } else { -1 }, aexp);
        let base = Monomial::q_pow_int(1, bexp);
        let order = 35;
        let lhs = pochhammer(&a, &base, Some(n + 1), order).unwrap();
        let last = LaurentPoly::one()
            .sub(&LaurentPoly::from(Monomial::q_pow_int(
                if sign { 1 } else { -1 },
                aexp + bexp * n as i64,
            )));
        let rhs = pochhammer(&a, &base, Some(n), order).unwrap().mul_poly(&last);
        prop_assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn pochhammer_infinite_absorbs_one_factor(aexp in 1i64..=5, bexp in 1i64..=4) {
        // (a; b)_inf = (1 - a) * (a b; b)_inf
        let a = Monomial::q_pow_int(1, aexp);
        let base = Monomial::q_pow_int(1, bexp);
        let order = 30;
        let lhs = pochhammer(&a, &base, None, order).unwrap();
        let first = LaurentPoly::one().sub(&LaurentPoly::from(a.clone()));
        let rhs = pochhammer(&a.mul(&base), &base, None, order)
            .unwrap()
            .mul_poly(&first);
        prop_assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn theta_quasi_periodicity(m in 2i64..=8, koff in 1i64..=7) {
        // theta(a b; b) = -a^(-1) theta(a; b) for a = q^k, b = q^m
        let k = 1 + (koff % m.max(1));
        prop_assume!(k < m + 1);
        let lhs = theta(&Monomial::q_pow_int(1, k + m), &Monomial::q_pow_int(1, m), 40).unwrap();
        let rhs = theta(&Monomial::q_pow_int(1, k), &Monomial::q_pow_int(1, m), 40)
            .unwrap()
            .mul_monomial(&Monomial::q_pow_int(-1, -k));
        prop_assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn theta_reflection_symmetry(m in 3i64..=8, koff in 1i64..=7) {
        // theta(b/a; b) = theta(a; b)
        let k = 1 + (koff % (m - 1));
        let lhs = theta(&Monomial::q_pow_int(1, m - k), &Monomial::q_pow_int(1, m), 35).unwrap();
        let rhs = theta(&Monomial::q_pow_int(1, k), &Monomial::q_pow_int(1, m), 35).unwrap();
        prop_assert!(lhs.agrees_with(&rhs));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn shift_coherence(
        offsets in prop::array::uniform4(-4i64..=4),
        t in 1i64..=3,
    ) {
        // Evaluating the shifted spec equals substituting x -> x q^t.
        let spec = mod14_spec(&offsets).unwrap();
        let delta: Vec<i64> = spec.xweights().iter().map(|w| w * t).collect();
        let rule = ShiftRule { var: Var::X, step: t, delta };
        let lhs = evaluate(&shift(&spec, &rule).unwrap(), 28).unwrap();
        let rhs = evaluate(&spec, 28)
            .unwrap()
            .substitute_x(&Monomial::new(1, 1, 0, t))
            .unwrap();
        prop_assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn declared_shift_rules_reject_wrong_deltas(
        offsets in prop::array::uniform4(-3i64..=3),
        t in 1i64..=3,
        slot in 0usize..4,
    ) {
        let spec = mod14_spec(&offsets).unwrap();
        let mut delta: Vec<i64> = spec.xweights().iter().map(|w| w * t).collect();
        delta[slot] += 1;
        let rule = ShiftRule { var: Var::X, step: t, delta };
        prop_assert!(shift(&spec, &rule).is_err());
    }

    #[test]
    fn enumeration_matches_naive_box(max_weight in 6i64..=15) {
        fn extend(prefix: &mut Vec<i64>, remaining: i64, cap: i64, out: &mut Vec<Vec<i64>>) {
            for part in (1..=remaining.min(cap)).rev() {
                prefix.push(part);
                out.push(prefix.clone());
                extend(prefix, remaining - part, part, out);
                prefix.pop();
            }
        }
        let mut naive: Vec<Vec<i64>> = vec![vec![]];
        extend(&mut Vec::new(), max_weight, max_weight, &mut naive);
        for set in SetName::ALL {
            let from_oracle: BTreeSet<Vec<i64>> = naive
                .iter()
                .filter(|parts| admits(&Partition::new((*parts).clone()).unwrap(), set).member)
                .cloned()
                .collect();
            let mut from_generator: BTreeSet<Vec<i64>> = BTreeSet::new();
            enumerate_base(max_weight, &mut |parts| {
                if subset_predicate(set, parts) {
                    from_generator.insert(parts.to_vec());
                }
            })
            .unwrap();
            prop_assert_eq!(&from_oracle, &from_generator, "set {}", set);
        }
    }
}
