use num_complex::Complex64;
use proptest::prelude::*;

use multact_core::actions::{
    conditional_expectation, invariant_expectation, rotation_by, Action, CompletelyAdditiveSequence, DilationAction,
    FgAction, FourierRotationAction, Observable, Partition, Permutation,
};
use multact_core::multfn::MultiplicativeFunctionSpec as S;

fn actions() -> Vec<Action> {
    vec![
        Action::Fg(rotation_by(&S::Liouville.compile().unwrap()).unwrap()),
        Action::Fg(rotation_by(&S::ModifiedDirichletCharacter { q: 5, index: 1 }.compile().unwrap()).unwrap()),
        Action::Fg(
            FgAction::new(
                12,
                vec![
                    (Permutation::shift(12, 1), CompletelyAdditiveSequence::omega()),
                    (Permutation::shift(12, 4), CompletelyAdditiveSequence::omega()),
                ],
            )
            .unwrap(),
        ),
        Action::Fg(FgAction::trivial(3)),
        Action::Dilation(DilationAction::new(97, 3).unwrap()),
    ]
}

fn vector(size: usize, raw: &[(f64, f64)]) -> Observable {
    Observable::Vector(
        (0..size)
            .map(|i| Complex64::new(raw[i % raw.len()].0, raw[i % raw.len()].1))
            .collect(),
    )
}

fn coprime_to(v: u128, m: u128) -> u128 {
    if v.is_multiple_of(m) {
        v + 1
    } else {
        v
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn apply_is_an_isometric_homomorphism(
        idx in 0usize..5,
        r in (1u128..=100_000, 1u128..=100_000),
        s in (1u128..=100_000, 1u128..=100_000),
        raw in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..8),
    ) {
        let act = &actions()[idx];
        let fix = |v: u128| if let Action::Dilation(_) = act { coprime_to(v, 97) } else { v };
        let (r, s) = ((fix(r.0), fix(r.1)), (fix(s.0), fix(s.1)));
        let f = vector(act.size().unwrap(), &raw);
        let lhs = act.apply((r.0 * s.0, r.1 * s.1), &f).unwrap();
        let rhs = act.apply(r, &act.apply(s, &f).unwrap()).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        prop_assert!((lhs.l2_norm() - f.l2_norm()).abs() <= 1e-12);
        prop_assert!(lhs.sup_norm() == f.sup_norm());
    }

    #[test]
    fn fourier_rotation_is_isometric(
        t in -2.0f64..2.0,
        r in (1u128..=10_000, 1u128..=10_000),
        coeffs in prop::collection::btree_map(-5i64..=5, (-1.0f64..1.0, -1.0f64..1.0), 1..6),
    ) {
        let act = Action::Fourier(FourierRotationAction::new(&S::Archimedean { t }).unwrap());
        let f = Observable::Fourier(coeffs.into_iter().map(|(k, (a, b))| (k, Complex64::new(a, b))).collect());
        let g = act.apply(r, &f).unwrap();
        prop_assert!((g.l2_norm() - f.l2_norm()).abs() <= 1e-12);
    }

    #[test]
    fn invariant_expectation_is_an_invariant_projection(
        idx in 0usize..4,
        raw in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..8),
        r in (1u128..=1000, 1u128..=1000),
    ) {
        let act = &actions()[idx];
        let f = vector(act.size().unwrap(), &raw);
        let e = invariant_expectation(act, &f).unwrap();
        prop_assert_eq!(&invariant_expectation(act, &e).unwrap(), &e);
        prop_assert_eq!(&act.apply(r, &e).unwrap(), &e);
    }

    #[test]
    fn conditional_expectation_is_a_positive_projection(
        values in prop::collection::vec(-3.0f64..3.0, 1..30),
        labels in prop::collection::vec(0usize..5, 30),
    ) {
        let n = values.len();
        let f = Observable::from_real(values.iter().copied());
        let p = Partition::from_labels(&labels[..n]);
        let e = conditional_expectation(&f, &p).unwrap();
        let twice = conditional_expectation(&e, &p).unwrap();
        prop_assert!(twice.distance(&e).unwrap() <= 1e-12);
        prop_assert!((e.integral() - f.integral()).norm() <= 1e-12);
        let pos = Observable::from_real(values.iter().map(|v| v.abs()));
        let ep = conditional_expectation(&pos, &p).unwrap();
        prop_assert!(ep.as_vector().unwrap().iter().all(|z| z.re >= 0.0 && z.im == 0.0));
    }
}
