use gausslab::characters::{fundamental_decomposition, is_perfect_square, QuadraticCharacter};
use gausslab::gaussian::{gcd, GaussianInt as G};
use proptest::prelude::*;

fn disc() -> impl Strategy<Value = G> {
    (-60i64..=60, -60i64..=60)
        .prop_map(|(a, b)| G::new(a, b))
        .prop_filter("nonzero non-square", |z| !z.is_zero() && !is_perfect_square(*z).unwrap())
}

fn odd() -> impl Strategy<Value = G> {
    (-80i64..=80, -80i64..=80).prop_map(|(a, b)| G::new(a, b)).prop_filter("odd", |z| z.is_odd())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn decomposition_reassembles(delta in disc()) {
        let dec = fundamental_decomposition(delta).unwrap();
        prop_assert_eq!(dec.unit * dec.d * dec.ell * dec.ell, delta);
    }

    #[test]
    fn character_is_multiplicative(delta in disc(), m in odd(), n in odd()) {
        let chi = QuadraticCharacter::for_disc(delta).unwrap();
        prop_assert_eq!(chi.eval(m * n).unwrap(), chi.eval(m).unwrap() * chi.eval(n).unwrap());
    }

    #[test]
    fn character_is_periodic_mod_conductor(delta in disc(), n in odd(), k in odd()) {
        let chi = QuadraticCharacter::for_disc(delta).unwrap();
        let shifted = n + k * chi.conductor;
        prop_assume!(shifted.is_odd());
        prop_assert_eq!(chi.eval(n).unwrap(), chi.eval(shifted).unwrap());
    }

    #[test]
    fn character_vanishes_exactly_on_shared_primes(delta in disc(), n in odd()) {
        let chi = QuadraticCharacter::for_disc(delta).unwrap();
        let shares = gcd(chi.generator(), n).unwrap().norm() > 1;
        prop_assert_eq!(chi.eval(n).unwrap() == 0, shares);
    }

    #[test]
    fn associate_discriminants_share_the_conductor_up_to_units(delta in disc()) {
        let base = QuadraticCharacter::for_disc(delta).unwrap().conductor;
        let negated = QuadraticCharacter::for_disc(-delta).unwrap().conductor;
        prop_assert_eq!(base.norm() % 2 == 1, negated.norm() % 2 == 1);
        prop_assert_eq!(gcd(base, G::new(1, 0)).unwrap(), gcd(negated, G::new(1, 0)).unwrap());
    }
}
