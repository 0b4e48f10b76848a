use std::collections::BTreeMap;

use num_bigint::BigInt;
use proptest::prelude::*;

use cycles_core::cycle::{
    congruent_mod_augmentation_power, exp_cycle, log_cycle, pontryagin, star_power,
};
use cycles_core::linalg::{SparseColumn, SpanSolver};
use cycles_core::rational::ratio;
use cycles_core::relation::{verify_relation, MembershipCertificate};
use cycles_core::tangent::{
    allowed_space, check_condition_doublestar, check_condition_star, split_subspace, Subspace,
};
use cycles_core::{Cycle, GroupPoint, Rational, RingContext};

fn cycle_strategy(rank: usize) -> impl Strategy<Value = Cycle> {
    prop::collection::vec((prop::collection::vec(-3i64..=3, rank), -5i64..=5, 1i64..=4), 0..5).prop_map(move |terms| {
        Cycle::from_terms(rank, terms.into_iter().map(|(p, n, d)| (GroupPoint::from_i64s(&p), ratio(n, d)))).unwrap()
    })
}

fn ctx(rank: usize) -> RingContext {
    RingContext::new(rank, 3).unwrap()
}

fn normalise_degree(c: &Cycle, target: i64) -> Cycle {
    // shift the coefficient of the origin so the degree is `target`
    let shift = Rational::from_integer(target.into()) - c.degree();
    c + &Cycle::unit(c.rank()).scale(&shift)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pontryagin_is_commutative_associative_unital(a in cycle_strategy(2), b in cycle_strategy(2), c in cycle_strategy(2)) {
        let ctx = ctx(2);
        let ab = pontryagin(&a, &b, &ctx).unwrap();
        prop_assert_eq!(&ab, &pontryagin(&b, &a, &ctx).unwrap());
        let ab_c = pontryagin(&ab, &c, &ctx).unwrap();
        let a_bc = pontryagin(&a, &pontryagin(&b, &c, &ctx).unwrap(), &ctx).unwrap();
        prop_assert_eq!(ab_c, a_bc);
        prop_assert_eq!(pontryagin(&a, &Cycle::unit(2), &ctx).unwrap(), a.clone());
        let lhs = pontryagin(&a, &(&b + &c), &ctx).unwrap();
        let rhs = &ab + &pontryagin(&a, &c, &ctx).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn degree_is_a_ring_map(a in cycle_strategy(1), b in cycle_strategy(1)) {
        let ctx = ctx(1);
        prop_assert_eq!(pontryagin(&a, &b, &ctx).unwrap().degree(), a.degree() * b.degree());
        prop_assert_eq!((&a + &b).degree(), a.degree() + b.degree());
    }

    #[test]
    fn pushforward_is_a_ring_map(a in cycle_strategy(2), b in cycle_strategy(2), n in -3i64..=3) {
        let ctx = ctx(2);
        let n = BigInt::from(n);
        let lhs = pontryagin(&a, &b, &ctx).unwrap().pushforward(&n);
        let rhs = pontryagin(&a.pushforward(&n), &b.pushforward(&n), &ctx).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(a.pushforward(&n).degree(), a.degree());
    }

    #[test]
    fn star_power_adds_exponents(a in cycle_strategy(1), i in 0u32..4, j in 0u32..4) {
        let ctx = ctx(1);
        let lhs = star_power(&a, i + j, &ctx).unwrap();
        let rhs = pontryagin(&star_power(&a, i, &ctx).unwrap(), &star_power(&a, j, &ctx).unwrap(), &ctx).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn log_and_exp_invert_modulo_nilpotency(a in cycle_strategy(1), g in 1u32..=4) {
        let ctx = RingContext::new(1, g).unwrap();
        let one = normalise_degree(&a, 1);
        let back = exp_cycle(&log_cycle(&one, &ctx).unwrap(), &ctx).unwrap();
        prop_assert!(congruent_mod_augmentation_power(&back, &one, g + 1));
        let zero = normalise_degree(&a, 0);
        let back = log_cycle(&exp_cycle(&zero, &ctx).unwrap(), &ctx).unwrap();
        prop_assert!(congruent_mod_augmentation_power(&back, &zero, g + 1));
    }

    #[test]
    fn span_solver_recovers_combinations(
        cols in prop::collection::vec(prop::collection::vec(-4i64..=4, 5), 1..6),
        weights in prop::collection::vec(-3i64..=3, 6),
    ) {
        let mut solver = SpanSolver::new();
        let sparse: Vec<SparseColumn> = cols
            .iter()
            .map(|c| c.iter().enumerate().filter(|(_, &x)| x != 0).map(|(i, &x)| (i, BigInt::from(x))).collect())
            .collect();
        for c in &sparse {
            solver.push_column(c.clone());
        }
        let mut target: BTreeMap<usize, BigInt> = BTreeMap::new();
        for (c, w) in sparse.iter().zip(&weights) {
            for (&i, x) in c {
                *target.entry(i).or_default() += x * w;
            }
        }
        target.retain(|_, x| *x != BigInt::from(0));
        let comb = solver.express(&target).expect("target lies in the span");
        let mut rebuilt: BTreeMap<usize, Rational> = BTreeMap::new();
        for (&idx, q) in &comb {
            for (&i, x) in &sparse[idx] {
                *rebuilt.entry(i).or_default() += q * Rational::from_integer(x.clone());
            }
        }
        rebuilt.retain(|_, x| *x != Rational::from_integer(0.into()));
        let expected: BTreeMap<usize, Rational> = target.into_iter().map(|(i, x)| (i, Rational::from_integer(x))).collect();
        prop_assert_eq!(rebuilt, expected);
    }

    #[test]
    fn subspace_dimension_formula(
        a in prop::collection::vec(prop::collection::vec(-2i64..=2, 4), 0..4),
        b in prop::collection::vec(prop::collection::vec(-2i64..=2, 4), 0..4),
    ) {
        let to_rows = |v: &Vec<Vec<i64>>| v.iter().map(|r| r.iter().map(|&x| Rational::from_integer(x.into())).collect()).collect::<Vec<Vec<Rational>>>();
        let a = Subspace::span(4, &to_rows(&a)).unwrap();
        let b = Subspace::span(4, &to_rows(&b)).unwrap();
        let sum = a.sum(&b).unwrap();
        let int = a.intersection(&b).unwrap();
        prop_assert_eq!(sum.dim() + int.dim(), a.dim() + b.dim());
        prop_assert_eq!(a.orthogonal_complement().dim(), 4 - a.dim());
    }

    #[test]
    fn star_condition_is_monotone(k in 2usize..=4, keep in prop::collection::vec(any::<bool>(), 4)) {
        // a (**)-configuration gives a (*)-subspace; every sub-basis must pass too
        let mut config = vec![Subspace::zero(k); 2];
        config[0] = Subspace::from_integer_rows(k, &[&{
            let mut v = vec![0i64; k];
            v[0] = 1;
            v[1] = -1;
            v
        }]).unwrap();
        config[1] = allowed_space(&config, 1);
        prop_assert!(check_condition_doublestar(&config).unwrap().is_none());
        let v = split_subspace(&config).unwrap();
        prop_assert!(check_condition_star(&v, 2, k).unwrap().is_none());
        let rows: Vec<Vec<Rational>> = v.basis().iter().zip(keep.iter().cycle()).filter(|(_, &b)| b).map(|(r, _)| r.clone()).collect();
        let sub = Subspace::new(2 * k, rows).unwrap();
        prop_assert!(check_condition_star(&sub, 2, k).unwrap().is_none());
    }
}

#[test]
fn certificates_survive_json() {
    for (k, g) in [(2, 1), (3, 2)] {
        let cert = verify_relation(k, g, k * (g + 1), k * (g + 1)).unwrap();
        let again = MembershipCertificate::from_json(&cert.to_json()).unwrap();
        assert_eq!(again, cert);
        again.verify().unwrap();
    }
}
