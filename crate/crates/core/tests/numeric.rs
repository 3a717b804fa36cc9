use nlgame::numeric::{compare, parse_scalar};
use nlgame::{QuadExt, Rational};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use std::cmp::Ordering;

const BITS: u32 = 60;

/// `floor(sqrt2 * 2^BITS)`; the true value lies in `[s, s + 1) / 2^BITS`.
fn scaled_root2() -> BigInt {
    (BigInt::from(2) << (2 * BITS)).sqrt()
}

/// Sign of `a + b sqrt2` from a 60-bit fixed-point enclosure of sqrt2.
/// `None` when the enclosure straddles zero.
fn float_sign(a: &Rational, b: &Rational) -> Option<Ordering> {
    let s = scaled_root2();
    let scale = Rational::from_integer(BigInt::from(1) << BITS);
    let lo_root = Rational::from_integer(s.clone()) / &scale;
    let hi_root = Rational::from_integer(s + 1) / &scale;
    let (lo, hi) = if b.is_negative() {
        (a + b * &hi_root, a + b * &lo_root)
    } else {
        (a + b * &lo_root, a + b * &hi_root)
    };
    if lo.is_positive() {
        Some(Ordering::Greater)
    } else if hi.is_negative() {
        Some(Ordering::Less)
    } else if a.is_zero() && b.is_zero() {
        Some(Ordering::Equal)
    } else {
        None
    }
}

fn rational() -> impl Strategy<Value = Rational> {
    (-10_000i64..10_000, 1i64..500).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

fn quad() -> impl Strategy<Value = QuadExt> {
    (rational(), rational()).prop_map(|(a, b)| QuadExt::new(a, b))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn sign_matches_fixed_point_evaluation(x in quad(), y in quad()) {
        let d = &x - &y;
        if let Some(expected) = float_sign(d.rat_part(), d.root2_part()) {
            prop_assert_eq!(compare(&x, &y), expected);
            prop_assert_eq!(x.cmp(&y), expected);
        }
    }

    #[test]
    fn rendering_round_trips(x in quad()) {
        let text = x.to_string();
        prop_assert_eq!(parse_scalar(&text).unwrap(), x);
    }

    #[test]
    fn conjugate_product_is_the_norm(a in rational(), b in rational()) {
        let x = QuadExt::new(a.clone(), b.clone());
        let two = Rational::from_integer(2.into());
        let expected = QuadExt::from_rational(&a * &a - two * &b * &b);
        prop_assert_eq!(&x * &x.conjugate(), expected);
    }
}

#[test]
fn close_pairs_are_ordered_exactly() {
    // 99/70 and 577/408 bracket sqrt2 to within 1e-5.
    let r2 = QuadExt::sqrt2();
    assert!(QuadExt::ratio(99, 70) > r2);
    assert!(QuadExt::ratio(577, 408) > r2);
    assert!(QuadExt::ratio(140, 99) < r2);
    let tiny = &QuadExt::ratio(665_857, 470_832) - &r2;
    assert!(tiny > QuadExt::zero());
}
