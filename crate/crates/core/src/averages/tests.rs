use super::*;
use crate::actions::{character, rotation_by, DilationAction, FourierRotationAction};
use crate::multfn::MultiplicativeFunctionSpec as S;
use crate::numtheory::liouville;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn lam_rot() -> Action {
    Action::Fg(rotation_by(&S::Liouville.compile().unwrap()).unwrap())
}

fn chi3_rot() -> Action {
    Action::Fg(rotation_by(&S::ModifiedDirichletCharacter { q: 3, index: 1 }.compile().unwrap()).unwrap())
}

fn lf(a: i64, b: i64) -> LinearForm {
    LinearForm::new(a, b).unwrap()
}

#[test]
fn single_average_trivial_and_periodic() {
    let triv = Action::Fg(FgAction::trivial(3));
    let f = Observable::from_real([1.0, -2.0, 5.0]);
    for (a, b, n) in [(1, 0, 10), (7, 3, 100)] {
        assert_eq!(single_average(&triv, &f, a, b, n).unwrap().value, f);
    }
    let x = character(2, 1);
    let r = single_average(&chi3_rot(), &x, 3, 1, 10_000).unwrap();
    assert_eq!(r.value, x);
    assert_eq!(r.contributing, 10_000);
}

#[test]
fn single_average_liouville() {
    let r = single_average(&lam_rot(), &character(2, 1), 1, 0, 1_000_000).unwrap();
    assert!(r.l2_norm() <= 0.01, "{}", r.l2_norm());
}

#[test]
fn cesaro_matches_direct_loop() {
    let act = Action::Dilation(DilationAction::new(101, 2).unwrap());
    let f = Observable::from_real((0..101).map(|x| ((x * x) % 7) as f64));
    let n = 250;
    let got = single_average(&act, &f, 1, 0, n).unwrap();
    let mut direct = vec![ComplexSum::new(); 101];
    let mut count = 0;
    for k in 1..=n as u128 {
        if k % 101 == 0 {
            continue;
        }
        count += 1;
        let img = act.apply((k, 1), &f).unwrap();
        for (s, v) in direct.iter_mut().zip(img.as_vector().unwrap()) {
            s.add(*v);
        }
    }
    assert_eq!(got.excluded, 2);
    let want = Observable::Vector(direct.iter().map(|s| s.value() / count as f64).collect());
    assert!(got.value.distance(&want).unwrap() < 1e-12);
}

#[test]
fn multilinear_examples() {
    let act = lam_rot();
    let one = Observable::constant(2, c(1.0));
    let forms = [LinearForm::m(), LinearForm::n(), lf(1, 1)];
    let r = multilinear_average(&[&act, &act, &act], &[&one, &one, &one], &forms, &Grid2D::full(), 50).unwrap();
    assert!(r.value.distance(&one).unwrap() < 1e-15);
    assert!(r.warnings.is_empty());

    let x = character(2, 1);
    let n = 60;
    let two_d = multilinear_average(&[&act], &[&x], &[LinearForm::m()], &Grid2D::full(), n).unwrap();
    let one_d = single_average(&act, &x, 1, 0, n).unwrap();
    assert!(two_d.value.distance(&one_d.value).unwrap() < 1e-12);

    let dep = multilinear_average(&[&act, &act], &[&x, &x], &[lf(1, 1), lf(2, 2)], &Grid2D::full(), 10).unwrap();
    assert_eq!(dep.warnings.len(), 1);
}

#[test]
fn multilinear_matches_scalar_oracle() {
    let act = lam_rot();
    let x = character(2, 1);
    let forms = [LinearForm::m(), LinearForm::n(), lf(1, 1), lf(1, 2)];
    let n = 120;
    let r = multilinear_average(&[&act; 4], &[&x; 4], &forms, &Grid2D::full(), n).unwrap();
    let mut s = 0i64;
    for m in 1..=n as u128 {
        for k in 1..=n as u128 {
            s += forms
                .iter()
                .map(|f| liouville(f.eval(m as i64, k as i64) as u128, None).unwrap() as i64)
                .product::<i64>();
        }
    }
    let want = s as f64 / (n * n) as f64;
    assert!((r.integral().re - want).abs() < 1e-12);
}

#[test]
fn rational_pair_examples() {
    let act = lam_rot();
    let f1 = Observable::from_real([2.0, 3.0]);
    let f2 = Observable::from_real([-1.0, 0.5]);
    let one = RationalPolynomialFL::one();
    let r = rational_pair_average(&act, &act, &f1, &f2, &one, &one, &Grid2D::full(), 20, None).unwrap();
    assert_eq!(r.value, f1.mul(&f2).unwrap());

    let n = 40;
    let r1 = RationalPolynomialFL::parse("(m) * (n)^-1").unwrap();
    let r2 = RationalPolynomialFL::parse("(m - n) * (m + n) * (m)^-1 * (n)^-1").unwrap();
    let filter = |m: i64, k: i64| m > k;
    let x = character(2, 1);
    let r = rational_pair_average(&act, &act, &x, &x, &r1, &r2, &Grid2D::full(), n, Some(&filter)).unwrap();
    assert_eq!(r.excluded, (n * (n + 1) / 2) as u64);
    let mut s = 0i64;
    for m in 1..=n as u128 {
        for k in 1..m {
            let l = |v: u128| liouville(v, None).unwrap() as i64;
            s += l(m) * l(k) * l(m - k) * l(m + k) * l(m) * l(k);
        }
    }
    assert!((r.integral().re - s as f64 / r.contributing as f64).abs() < 1e-12);
}

#[test]
fn recurrence_examples() {
    let act = lam_rot();
    let whole = Observable::constant(2, c(1.0));
    let rs = [
        RationalPolynomialFL::parse("(m)").unwrap(),
        RationalPolynomialFL::parse("(n)").unwrap(),
    ];
    let p = recurrence_profile(&[&act, &act], &whole, &rs, &Grid2D::full(), 30, 0.01, None).unwrap();
    assert_eq!(p.good_density, 1.0);
    assert_eq!(p.min_measure, 1.0);

    let empty = Observable::constant(2, c(0.0));
    assert!(matches!(
        recurrence_profile(&[&act, &act], &empty, &rs, &Grid2D::full(), 30, 0.01, None),
        Err(AveragesError::EmptySet)
    ));

    let a = Observable::from_real([1.0, 0.0]);
    let p = recurrence_profile(&[&act, &act], &a, &rs, &Grid2D::full(), 30, 0.0, None).unwrap();
    for (mu, _) in &p.distribution {
        assert!(*mu >= 0.0 && *mu <= p.measure_a);
    }
    let want_good = (1..=30u128)
        .flat_map(|m| (1..=30u128).map(move |n| (m, n)))
        .filter(|&(m, n)| liouville(m, None).unwrap() == 1 && liouville(n, None).unwrap() == 1)
        .count();
    assert_eq!(p.good as usize, want_good);
}

#[test]
fn concentration_examples() {
    let x = character(2, 1);
    let r = concentration_statistic(&chi3_rot(), &x, 1296, 1, 5000, &Reference::Base, None).unwrap();
    assert_eq!(r.value, 0.0);
    let r = concentration_statistic(&lam_rot(), &x, 1, 1, 5000, &Reference::RunningAverage, None).unwrap();
    assert!(r.value > 0.9 && r.value <= 2f64.sqrt());
    assert!(concentration_statistic(&lam_rot(), &x, 6, -1, 10, &Reference::Base, None).is_err());
}

#[test]
fn archimedean_concentration_needs_restriction() {
    let act = Action::Fourier(FourierRotationAction::new(&S::Archimedean { t: 1.0 }).unwrap());
    let e1 = Observable::basis(1);
    let un = concentration_statistic(&act, &e1, 720, 1, 10_000, &Reference::RunningAverage, None).unwrap();
    let s = SdeltaSpec::new(0.05).unwrap();
    let re = concentration_statistic(&act, &e1, 720, 1, 10_000, &Reference::RunningAverage, Some(&s)).unwrap();
    assert!(un.value > 0.3, "{}", un.value);
    assert!(re.value < 0.1, "{}", re.value);
    assert!(re.contributing < 10_000);
}

#[test]
fn correlation_examples() {
    let act = lam_rot();
    let f = Observable::Vector(vec![Complex64::new(0.3, 1.0), Complex64::new(-2.0, 0.5)]);
    let norm2 = f.l2_norm().powi(2);
    assert!((correlation(&act, &f, (3, 2), (3, 2)).unwrap() - c(norm2)).norm() < 1e-12);
    let a = correlation(&act, &f, (2, 1), (3, 2)).unwrap();
    let b = correlation(&act, &f, (3, 2), (2, 1)).unwrap();
    assert!((a - b.conj()).norm() < 1e-15);
    let triv = Action::Fg(FgAction::trivial(2));
    assert!((correlation(&triv, &f, (5, 1), (7, 3)).unwrap() - c(norm2)).norm() < 1e-12);
}

#[test]
fn projection_examples() {
    let k = Observable::constant(2, c(0.75));
    let p = pretentious_projection(&lam_rot(), &k, 3, 3, DEFAULT_SEED, 2000, &[(1, 0)], 100).unwrap();
    assert_eq!(p.f_p, k);
    assert_eq!(p.f_a, Observable::constant(2, c(0.0)));

    let x = character(2, 1);
    let p = pretentious_projection(&chi3_rot(), &x, 3, 2, DEFAULT_SEED, 5000, &[(1, 0), (2, 1)], 1000).unwrap();
    assert!(p.f_a.l2_norm() < 1e-12);
    let sum = p.f_p.integral() + p.f_a.integral();
    assert!((sum - x.integral()).norm() < 1e-12);

    let dil = Action::Dilation(DilationAction::new(7, 1).unwrap());
    assert!(pretentious_projection(&dil, &character(7, 1), 3, 1, 0, 10, &[], 10).is_err());
}

#[test]
fn omega_product_examples() {
    let shift3 = Permutation::shift(3, 1);
    let shift2 = Permutation::shift(2, 1);
    let om = CompletelyAdditiveSequence::omega();
    let f1 = Observable::constant(3, c(2.0));
    let f2 = Observable::constant(2, c(-0.5));
    let r = omega_product_average(
        &[shift3, shift2.clone()],
        &[om.clone(), om.clone()],
        &[f1, f2],
        &[lf(1, 1), lf(1, 2)],
        30,
    )
    .unwrap();
    assert!(r.value.distance(&Observable::constant(6, c(-1.0))).unwrap() < 1e-15);

    let x = character(2, 1);
    let n = 50;
    let r = omega_product_average(&[shift2], &[om], &[x], &[lf(1, 1)], n).unwrap();
    let mut s = 0i64;
    for m in 1..=n as u128 {
        for k in 1..=n as u128 {
            s += liouville(m + k, None).unwrap() as i64;
        }
    }
    let v = r.value.as_vector().unwrap();
    assert!((v[0].re - s as f64 / (n * n) as f64).abs() < 1e-12);
    assert!((v[1].re + s as f64 / (n * n) as f64).abs() < 1e-12);
}

#[test]
fn digit_examples() {
    let om = CompletelyAdditiveSequence::omega();
    let zeros = vec![0u8; 64];
    let r = digit_density(&[2], &[0], std::slice::from_ref(&om), &[lf(1, 1)], &[zeros], 40).unwrap();
    assert_eq!(r.frequency, 1.0);
    let r = digit_density(&[], &[], &[], &[], &[], 40).unwrap();
    assert_eq!(r.frequency, 1.0);
    assert!(digit_density(&[2], &[2], &[om], &[lf(1, 1)], &[vec![0; 4]], 4).is_err());
    let s = digit_stream(3, 100, 7, 1);
    assert_eq!(s[0], 0);
    assert!(s.iter().all(|&d| d < 3));
    assert_eq!(s, digit_stream(3, 100, 7, 1));
    assert_ne!(s, digit_stream(3, 100, 7, 2));
}

#[test]
fn lemma_check_examples() {
    let x = character(2, 1);
    let r = lemma_ln_check(&chi3_rot(), &x, 1296, 1, (1, 2), 300).unwrap();
    assert_eq!(r.epsilon, 0.0);
    assert_eq!(r.lhs, 0.0);
    let r = lemma_ln_check(&lam_rot(), &x, 1, 1, (1, 1), 300).unwrap();
    assert!(r.lhs <= r.bound + r.slack);
}
