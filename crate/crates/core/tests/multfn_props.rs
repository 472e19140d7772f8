use std::collections::BTreeMap;

use num_complex::Complex64;
use proptest::prelude::*;

use multact_core::multfn::{pretentious_distance_sq, MultiplicativeFunctionSpec as S};
use multact_core::numtheory::euler_phi;

fn spec() -> impl Strategy<Value = S> {
    let leaf = prop_oneof![
        Just(S::Liouville),
        (1u64..=12, 0usize..16).prop_map(|(q, i)| S::DirichletCharacter {
            q,
            index: i % euler_phi(q) as usize
        }),
        (1u64..=12, 0usize..16).prop_map(|(q, i)| S::ModifiedDirichletCharacter {
            q,
            index: i % euler_phi(q) as usize
        }),
        (-3.0f64..3.0).prop_map(|t| S::Archimedean { t }),
        prop::collection::btree_map(prop::sample::select(vec![2u64, 3, 5, 7, 11, 13]), 0.0f64..1.0, 0..4).prop_map(
            |m| {
                S::PrimeTable {
                    values: m
                        .into_iter()
                        .map(|(p, th)| (p, Complex64::from_polar(1.0, std::f64::consts::TAU * th)))
                        .collect::<BTreeMap<_, _>>(),
                    default: Complex64::new(1.0, 0.0),
                }
            }
        ),
    ];
    leaf.prop_recursive(2, 6, 3, |inner| {
        prop_oneof![
            (inner.clone(), -3i64..=3).prop_map(|(b, k)| S::Power { base: Box::new(b), k }),
            prop::collection::vec(inner, 1..3).prop_map(S::Product),
        ]
    })
    .prop_filter("compiles", |s| s.compile().is_ok())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn eval_is_completely_multiplicative(s in spec(), m in 1u128..=10_000, n in 1u128..=10_000) {
        let f = s.compile().unwrap();
        let lhs = f.eval(m * n).unwrap();
        let rhs = f.eval(m).unwrap() * f.eval(n).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12, "{:?} vs {:?}", lhs, rhs);
    }

    #[test]
    fn power_matches_repeated_eval(q in 3u64..=12, i in 0usize..16, k in -4i64..=4, n in 1u128..=100_000) {
        for base in [S::Liouville, S::DirichletCharacter { q, index: i % euler_phi(q) as usize }] {
            let f = base.compile().unwrap();
            let p = match (S::Power { base: Box::new(base), k }).compile() {
                Ok(p) => p,
                Err(_) => {
                    prop_assert!(k < 0 && !f.is_unimodular());
                    continue;
                }
            };
            let want = f.eval(n).unwrap().powi(k as i32);
            prop_assert!((p.eval(n).unwrap() - want).norm() <= 1e-12);
        }
    }

    #[test]
    fn distance_monotone_in_range(f in spec(), g in spec(), p1 in 2u64..500, extra in 0u64..500) {
        let (f, g) = (f.compile().unwrap(), g.compile().unwrap());
        let d1 = pretentious_distance_sq(&f, &g, p1);
        let d2 = pretentious_distance_sq(&f, &g, p1 + extra);
        prop_assert!(d2 + 1e-12 >= d1);
        if f.is_unimodular() {
            prop_assert!(pretentious_distance_sq(&f, &f, p1).abs() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn distance_triangle_inequality(f in spec(), g in spec(), h in spec()) {
        let (f, g, h) = (f.compile().unwrap(), g.compile().unwrap(), h.compile().unwrap());
        let big_p = 500;
        let d = |a, b| pretentious_distance_sq(a, b, big_p).max(0.0).sqrt();
        prop_assert!(d(&f, &h) <= d(&f, &g) + d(&g, &h) + 1e-9);
    }
}

#[test]
fn distance_vanishes_only_on_agreement() {
    let lam = S::Liouville.compile().unwrap();
    let mut values = BTreeMap::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29] {
        values.insert(p, Complex64::new(-1.0, 0.0));
    }
    let agree = S::PrimeTable {
        values: values.clone(),
        default: Complex64::new(1.0, 0.0),
    }
    .compile()
    .unwrap();
    assert!(pretentious_distance_sq(&lam, &agree, 29).abs() < 1e-15);
    assert!(pretentious_distance_sq(&lam, &agree, 31) > 0.0);
    values.insert(13, Complex64::new(1.0, 0.0));
    let differ = S::PrimeTable {
        values,
        default: Complex64::new(1.0, 0.0),
    }
    .compile()
    .unwrap();
    assert!(pretentious_distance_sq(&lam, &differ, 29) > 0.0);
}
