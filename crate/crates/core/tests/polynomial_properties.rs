//! Ring axioms and evaluation laws for exact polynomials over Q[a,b,g,d].

mod common;

use common::identities::{point, polynomial, rational};
use liecodazzi::poly::{Assignment, Polynomial, Style, Var};
use num_traits::Zero;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn addition_is_an_abelian_group(p in polynomial(), q in polynomial(), r in polynomial()) {
        prop_assert_eq!(&p + &q, &q + &p);
        prop_assert_eq!(&(&p + &q) + &r, &p + &(&q + &r));
        prop_assert_eq!(&p + &Polynomial::zero(), p.clone());
        prop_assert!((&p + &(-&p)).is_zero());
        prop_assert!((&p - &p).is_zero());
    }

    #[test]
    fn multiplication_is_commutative_associative_unital(p in polynomial(), q in polynomial(), r in polynomial()) {
        prop_assert_eq!(&p * &q, &q * &p);
        prop_assert_eq!(&(&p * &q) * &r, &p * &(&q * &r));
        prop_assert_eq!(&p * &Polynomial::one(), p.clone());
        prop_assert!((&p * &Polynomial::zero()).is_zero());
    }

    #[test]
    fn multiplication_distributes(p in polynomial(), q in polynomial(), r in polynomial()) {
        prop_assert_eq!(&p * &(&q + &r), &(&p * &q) + &(&p * &r));
        prop_assert_eq!(&(&p + &q) * &r, &(&p * &r) + &(&q * &r));
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(p in polynomial(), q in polynomial(), x in point()) {
        prop_assert_eq!((&p + &q).eval(&x), p.eval(&x) + q.eval(&x));
        prop_assert_eq!((&p * &q).eval(&x), p.eval(&x) * q.eval(&x));
        prop_assert_eq!((-&p).eval(&x), -p.eval(&x));
    }

    #[test]
    fn substitution_then_evaluation_composes(p in polynomial(), s in polynomial(), x in point()) {
        let mut asg = Assignment::new();
        asg.insert(Var::B, s.clone());
        let inner = x.with(Var::B, s.eval(&x));
        prop_assert_eq!(p.substitute(&asg).eval(&x), p.eval(&inner));
    }

    #[test]
    fn substituting_a_point_evaluates(p in polynomial(), x in point()) {
        let c = p.substitute(&x.to_assignment());
        prop_assert!(c.is_constant());
        prop_assert_eq!(c.constant_value().unwrap(), p.eval(&x));
    }

    #[test]
    fn powers_agree_with_repeated_products(p in polynomial(), n in 0u32..4) {
        let mut expected = Polynomial::one();
        for _ in 0..n {
            expected = &expected * &p;
        }
        prop_assert_eq!(p.pow(n), expected);
    }

    #[test]
    fn rendering_round_trips(p in polynomial()) {
        prop_assert_eq!(Polynomial::parse(&p.render(Style::Ascii)).unwrap(), p.clone());
        prop_assert_eq!(p.render(Style::Unicode).parse::<Polynomial>().unwrap(), p);
    }

    #[test]
    fn json_terms_round_trip(p in polynomial()) {
        let json = serde_json::to_string(&p).unwrap();
        let back: Polynomial = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn scaling_is_detected(p in polynomial(), c in rational()) {
        prop_assume!(!c.is_zero() && !p.is_zero());
        prop_assert!(p.scale(&c).equal_up_to_scaling(&p));
        prop_assert_eq!(p.scale(&c).monic(), p.monic());
    }

    #[test]
    fn degree_of_product_adds(p in polynomial(), q in polynomial()) {
        prop_assume!(!p.is_zero() && !q.is_zero());
        prop_assert_eq!((&p * &q).total_degree(), Some(p.total_degree().unwrap() + q.total_degree().unwrap()));
    }
}
