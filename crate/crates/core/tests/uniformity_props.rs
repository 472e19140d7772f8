use num_complex::Complex64;
use proptest::prelude::*;

use multact_core::actions::{rotation_by, Action, DilationAction, Observable};
use multact_core::multfn::MultiplicativeFunctionSpec as S;
use multact_core::uniformity::{gowers_norm, gowers_norm_recursive, gowers_u2_fft, mixed_seminorm, PeriodizedSequence};

fn seq(n: usize) -> impl Strategy<Value = PeriodizedSequence> {
    prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), n).prop_map(|v| {
        PeriodizedSequence::new(
            v.into_iter()
                .map(|(r, t)| Complex64::from_polar(r, std::f64::consts::TAU * t))
                .collect(),
        )
        .unwrap()
    })
}

fn pair() -> impl Strategy<Value = (PeriodizedSequence, PeriodizedSequence)> {
    (1usize..=20).prop_flat_map(|n| (seq(n), seq(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn triangle_and_monotonicity((a, b) in pair()) {
        let sum = a.add(&b).unwrap();
        let mut prev = 0.0;
        for s in 1..=4 {
            let na = gowers_norm(&a, s).unwrap();
            let nb = gowers_norm(&b, s).unwrap();
            prop_assert!(gowers_norm(&sum, s).unwrap() <= na + nb + 1e-9);
            prop_assert!(na + 1e-9 >= prev);
            prev = na;
        }
    }

    #[test]
    fn fft_matches_recursion(a in (16usize..=300).prop_flat_map(seq)) {
        prop_assert!((gowers_u2_fft(&a) - gowers_norm_recursive(&a, 2).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn mixed_seminorm_below_sup(
        idx in 0usize..3,
        raw in prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0), 1..6),
        s in 1u32..=3,
        n in 1usize..=64,
    ) {
        let acts = [
            Action::Fg(rotation_by(&S::Liouville.compile().unwrap()).unwrap()),
            Action::Fg(rotation_by(&S::ModifiedDirichletCharacter { q: 5, index: 1 }.compile().unwrap()).unwrap()),
            Action::Dilation(DilationAction::new(67, 1).unwrap()),
        ];
        let act = &acts[idx];
        let size = act.size().unwrap();
        let f = Observable::Vector((0..size).map(|i| Complex64::new(raw[i % raw.len()].0, raw[i % raw.len()].1)).collect());
        let v = mixed_seminorm(act, &f, s, n).unwrap();
        prop_assert!(v >= 0.0 && v <= f.sup_norm() + 1e-12);
    }
}
