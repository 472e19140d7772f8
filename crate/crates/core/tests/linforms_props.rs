use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use multact_core::linforms::{lattice_indicator_check, LinearForm, RationalPolynomialFL, RpValue};

fn form() -> impl Strategy<Value = LinearForm> {
    (-6i64..=6, -6i64..=6)
        .prop_filter("nonzero", |(a, b)| *a != 0 || *b != 0)
        .prop_map(|(a, b)| LinearForm::new(a, b).unwrap())
}

fn raw_factors() -> impl Strategy<Value = Vec<(LinearForm, i32)>> {
    prop::collection::vec((form(), -3i32..=3), 0..4)
}

fn direct(c: &BigRational, factors: &[(LinearForm, i32)], m: i64, n: i64) -> Option<BigRational> {
    let mut acc = c.clone();
    for &(f, k) in factors {
        let v = BigRational::from_integer(BigInt::from(f.eval(m, n)));
        if k < 0 && v.is_zero() {
            return None;
        }
        for _ in 0..k.abs() {
            acc = if k > 0 { acc * &v } else { acc / &v };
        }
    }
    Some(acc)
}

fn as_value(v: RpValue) -> Option<BigRational> {
    match v {
        RpValue::Value(x) => Some(x),
        RpValue::Zero => Some(BigRational::zero()),
        RpValue::Undefined => None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn canonical_form_is_idempotent_and_value_preserving(
        raw in raw_factors(),
        c in 1i64..=20,
        points in prop::collection::vec((-30i64..=30, -30i64..=30), 10),
    ) {
        let c = BigRational::from_integer(BigInt::from(c));
        let Ok(r) = RationalPolynomialFL::new(c.clone(), raw.clone()) else { return Ok(()); };
        let again = RationalPolynomialFL::new(r.constant().clone(), r.factors().to_vec()).unwrap();
        prop_assert_eq!(&again, &r);
        for (m, n) in points {
            let want = direct(&c, &raw, m, n);
            match r.eval(m, n) {
                RpValue::Undefined => {
                    prop_assert!(want.is_none() || raw.iter().any(|&(f, k)| k < 0 && f.eval(m, n) == 0));
                }
                v => {
                    if let Some(w) = want {
                        prop_assert_eq!(as_value(v).unwrap(), w);
                    }
                }
            }
        }
    }

    #[test]
    fn invertible_substitution_keeps_degree(
        raw in raw_factors(),
        u in (-4i64..=4, -4i64..=4, -4i64..=4, -4i64..=4),
    ) {
        prop_assume!(u.0 * u.3 - u.1 * u.2 != 0);
        let Ok(r) = RationalPolynomialFL::from_factors(raw) else { return Ok(()); };
        let s = r.substitute((u.0, u.1, 0), (u.2, u.3, 0)).unwrap();
        prop_assert_eq!(s.degree(), r.degree());
    }

    #[test]
    fn power_form_root(
        raw in prop::collection::vec((form(), -2i32..=2), 1..3),
        r in 1u32..=3,
        points in prop::collection::vec((1i64..=40, 1i64..=40), 10),
    ) {
        let raised: Vec<(LinearForm, i32)> = raw.iter().map(|&(f, k)| (f, k * r as i32)).collect();
        let Ok(p) = RationalPolynomialFL::from_factors(raised) else { return Ok(()); };
        let Ok(order) = p.power_form_order(None) else { return Ok(()); };
        let root = p.root(order as u32).unwrap();
        for (m, n) in points {
            let (Some(v), Some(w)) = (as_value(p.eval(m, n)), as_value(root.eval(m, n))) else { continue; };
            let mut pw = BigRational::one();
            for _ in 0..order {
                pw *= &w;
            }
            prop_assert_eq!(v, p.constant() * pw);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn lattice_identity(
        a in (-8i64..=8, -8i64..=8, -8i64..=8, -8i64..=8),
        m in -100i64..=100,
        n in -100i64..=100,
    ) {
        prop_assume!(a.0 * a.3 - a.1 * a.2 != 0);
        let chk = lattice_indicator_check(&[[a.0, a.1], [a.2, a.3]], m, n).unwrap();
        prop_assert!(chk.agrees(1e-9), "{:?}", chk);
    }
}
