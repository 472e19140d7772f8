//! Multiplicative measure-preserving actions on finite spaces and on Fourier sums.
//!
//! An action assigns to every positive integer `n` an invertible
//! measure-preserving map `T_n` with `T_1 = id` and `T_{mn} = T_m ∘ T_n`,
//! extended to positive rationals by `T_{m/n} = T_m ∘ T_n^{-1}`. Observables
//! transform by composition, `T_r F = F ∘ T_r`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

mod dilation;
mod fg;
mod fourier;
mod observable;
mod partition;

pub use dilation::DilationAction;
pub use fg::{rotation_by, CompletelyAdditiveSequence, FgAction, Permutation, MAX_GROUP_SIZE};
pub use fourier::FourierRotationAction;
pub use observable::Observable;
pub use partition::{conditional_expectation, Partition};

use crate::multfn::{MultFnError, MultiplicativeFunctionSpec};
use crate::numtheory::{progression_factorize, shared_table, NumTheoryError, AUTO_TABLE_LIMIT};
use crate::par;

#[derive(Debug, thiserror::Error)]
pub enum ActionError {
    #[error("state space must be nonempty")]
    EmptySpace,
    #[error("observables live on spaces of different sizes ({left} vs {right})")]
    SpaceMismatch { left: usize, right: usize },
    #[error("{0} needs observables of the same kind")]
    KindMismatch(&'static str),
    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("generators {0} and {1} do not commute")]
    NonCommuting(usize, usize),
    #[error("group too large to encode")]
    GroupTooLarge,
    #[error("invalid additive sequence: {0}")]
    InvalidSequence(String),
    #[error("cannot build a rotation: {0}")]
    NotARotation(String),
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("dilation power must be positive")]
    InvalidPower,
    #[error("{0} is not invertible for this dilation")]
    NonInvertible(u128),
    #[error("arguments must be positive")]
    NonPositive,
    #[error("unsupported for this action: {0}")]
    Unsupported(&'static str),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("observable has the wrong kind for this action")]
    WrongObservable,
    #[error(transparent)]
    NumTheory(#[from] NumTheoryError),
    #[error(transparent)]
    MultFn(#[from] MultFnError),
}

/// A uniform probability space on `0..size`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteSpace {
    pub size: usize,
}

impl FiniteSpace {
    pub fn new(size: usize) -> Result<Self, ActionError> {
        if size == 0 {
            return Err(ActionError::EmptySpace);
        }
        Ok(Self { size })
    }

    pub fn measure(&self, count: usize) -> f64 {
        count as f64 / self.size as f64
    }
}

#[derive(Clone, Debug)]
pub enum Action {
    Fg(FgAction),
    Dilation(DilationAction),
    Fourier(FourierRotationAction),
}

impl From<FgAction> for Action {
    fn from(a: FgAction) -> Self {
        Action::Fg(a)
    }
}

impl From<DilationAction> for Action {
    fn from(a: DilationAction) -> Self {
        Action::Dilation(a)
    }
}

impl From<FourierRotationAction> for Action {
    fn from(a: FourierRotationAction) -> Self {
        Action::Fourier(a)
    }
}

impl Action {
    /// Number of points, or `None` for the Fourier model.
    pub fn size(&self) -> Option<usize> {
        match self {
            Action::Fg(a) => Some(a.size()),
            Action::Dilation(a) => Some(a.size()),
            Action::Fourier(_) => None,
        }
    }

    pub fn is_discrete(&self) -> bool {
        !matches!(self, Action::Fourier(_))
    }

    /// Upper bound on group codes.
    pub fn group_size(&self) -> Option<u128> {
        match self {
            Action::Fg(a) => Some(a.group_size()),
            Action::Dilation(a) => Some(a.modulus() as u128),
            Action::Fourier(_) => None,
        }
    }

    pub fn identity_code(&self) -> Result<u128, ActionError> {
        match self {
            Action::Fg(a) => Ok(a.identity_code()),
            Action::Dilation(a) => Ok(a.identity_code()),
            Action::Fourier(_) => Err(ActionError::Unsupported("group codes")),
        }
    }

    /// Group code of `T_n`.
    pub fn code(&self, n: u128) -> Result<u128, ActionError> {
        if n == 0 {
            return Err(ActionError::NonPositive);
        }
        match self {
            Action::Fg(a) => a.code(n),
            Action::Dilation(a) => a.code(n),
            Action::Fourier(_) => Err(ActionError::Unsupported("group codes")),
        }
    }

    pub fn compose(&self, a: u128, b: u128) -> u128 {
        match self {
            Action::Fg(g) => g.compose(a, b),
            Action::Dilation(d) => d.compose(a, b),
            Action::Fourier(_) => unreachable!("Fourier rotations have no group codes"),
        }
    }

    pub fn pow(&self, a: u128, k: i64) -> u128 {
        match self {
            Action::Fg(g) => g.pow(a, k),
            Action::Dilation(d) => d.pow(a, k),
            Action::Fourier(_) => unreachable!("Fourier rotations have no group codes"),
        }
    }

    /// Group code of `T_{m/n}`.
    pub fn code_rational(&self, m: u128, n: u128) -> Result<u128, ActionError> {
        let a = self.code(m)?;
        let b = self.code(n)?;
        Ok(self.compose(a, self.pow(b, -1)))
    }

    /// Image of the point `x` under the element with the given code.
    pub fn map_point(&self, code: u128, x: usize) -> usize {
        match self {
            Action::Fg(g) => g.map_point(code, x),
            Action::Dilation(d) => d.map_point(code, x),
            Action::Fourier(_) => unreachable!("Fourier rotations have no points"),
        }
    }

    fn check_vector<'a>(&self, f: &'a Observable) -> Result<&'a [Complex64], ActionError> {
        let v = f.as_vector().ok_or(ActionError::WrongObservable)?;
        let size = self.size().ok_or(ActionError::WrongObservable)?;
        if v.len() != size {
            return Err(ActionError::SpaceMismatch {
                left: size,
                right: v.len(),
            });
        }
        Ok(v)
    }

    /// `F ∘ T` for the element with the given code.
    pub fn apply_code(&self, code: u128, f: &Observable) -> Result<Observable, ActionError> {
        let v = self.check_vector(f)?;
        Ok(Observable::Vector(match self {
            Action::Fg(g) => g.apply_code(code, v),
            Action::Dilation(d) => d.apply_code(code, v),
            Action::Fourier(_) => unreachable!(),
        }))
    }

    /// `T_{m/n} F = F ∘ T_m ∘ T_n^{-1}`.
    pub fn apply(&self, r: (u128, u128), f: &Observable) -> Result<Observable, ActionError> {
        let (m, n) = r;
        if m == 0 || n == 0 {
            return Err(ActionError::NonPositive);
        }
        let g = m.gcd(&n);
        let (m, n) = (m / g, n / g);
        match self {
            Action::Fourier(a) => match f {
                Observable::Fourier(c) => Ok(a.apply_value(a.value(m, n)?, c)),
                Observable::Vector(_) => Err(ActionError::WrongObservable),
            },
            _ => {
                self.check_vector(f)?;
                let code = self.code_rational(m, n)?;
                self.apply_code(code, f)
            }
        }
    }

    /// `T_r` applied to `F` through an already evaluated `f(r)` (Fourier model only).
    pub fn apply_fourier_value(&self, z: Complex64, f: &Observable) -> Result<Observable, ActionError> {
        match (self, f) {
            (Action::Fourier(a), Observable::Fourier(c)) => Ok(a.apply_value(z, c)),
            _ => Err(ActionError::WrongObservable),
        }
    }

    /// Group codes of `T_{a·t + b}` for `t = 1..=count`; `None` marks
    /// arguments that are not invertible (dilations at multiples of `M`).
    pub fn codes_on_progression(&self, a: u128, b: i128, count: usize) -> Result<Vec<Option<u128>>, ActionError> {
        if a == 0 || (a as i128).checked_add(b).is_none_or(|v| v < 1) {
            return Err(ActionError::NonPositive);
        }
        match self {
            Action::Dilation(d) => {
                let m = d.modulus() as i128;
                let a_m = (a % m as u128) as i128;
                let b_m = b.rem_euclid(m);
                Ok((1..=count as i128)
                    .map(|t| {
                        let r = (a_m * (t % m) + b_m) % m;
                        (r != 0).then_some(r as u128)
                    })
                    .collect())
            }
            Action::Fg(g) => {
                if g.generators().next().is_none() {
                    return Ok(vec![Some(0); count]);
                }
                let top = crate::numtheory::progression::validate_progression(a, b, count)?;
                if top <= AUTO_TABLE_LIMIT as u128 {
                    if let Some(t) = shared_table(top as u64) {
                        let parts = par::map_chunks(count, par::DEFAULT_CHUNK, |r| {
                            r.map(|i| Some(g.code_with_table((a * (i as u128 + 1)).wrapping_add_signed(b) as u64, &t)))
                                .collect::<Vec<_>>()
                        });
                        return Ok(parts.into_iter().flatten().collect());
                    }
                }
                let facs = progression_factorize(a, b, count, None)?;
                Ok(par::map_ordered(&facs, |f| Some(g.code_of_factors(f.factors()))))
            }
            Action::Fourier(_) => Err(ActionError::Unsupported("group codes")),
        }
    }
}

/// Indicator of `T_r^{-1} A`, i.e. `1_A ∘ T_r`.
pub fn preimage_set(action: &Action, r: (u128, u128), a: &Observable) -> Result<Observable, ActionError> {
    if !a.is_indicator() {
        return Err(ActionError::WrongObservable);
    }
    action.apply(r, a)
}

/// `E(F | I)` for the σ-algebra of `T`-invariant sets: orbit averages.
pub fn invariant_expectation(action: &Action, f: &Observable) -> Result<Observable, ActionError> {
    match action {
        Action::Fg(g) => {
            action.check_vector(f)?;
            let labels = g.orbits()?;
            conditional_expectation(f, &Partition::from_labels(&labels))
        }
        _ => Err(ActionError::Unsupported(
            "invariant expectation needs a finitely generated action",
        )),
    }
}

/// Permutation descriptions accepted in configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PermutationDesc {
    Identity,
    /// `x ↦ x + shift mod size`.
    Cycle {
        #[serde(default = "one")]
        shift: i64,
    },
    ProductOfCycles {
        cycles: Vec<Vec<usize>>,
    },
    Array {
        map: Vec<usize>,
    },
}

fn one() -> i64 {
    1
}

impl PermutationDesc {
    pub fn build(&self, size: usize) -> Result<Permutation, ActionError> {
        match self {
            PermutationDesc::Identity => Ok(Permutation::identity(size)),
            PermutationDesc::Cycle { shift } => Ok(Permutation::shift(size, *shift)),
            PermutationDesc::ProductOfCycles { cycles } => Permutation::from_cycles(size, cycles),
            PermutationDesc::Array { map } => {
                if map.len() != size {
                    return Err(ActionError::NotAPermutation(size));
                }
                Permutation::new(map.clone())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorDesc {
    pub permutation: PermutationDesc,
    pub sequence: CompletelyAdditiveSequence,
}

/// Action descriptions accepted in configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ActionDesc {
    FinitelyGenerated {
        size: usize,
        #[serde(default)]
        generators: Vec<GeneratorDesc>,
    },
    /// The cyclic rotation realizing a finitely generated unimodular function.
    RotationBy {
        function: MultiplicativeFunctionSpec,
    },
    Dilation {
        modulus: u64,
        #[serde(default = "one_u32")]
        power: u32,
    },
    FourierRotation {
        function: MultiplicativeFunctionSpec,
    },
}

fn one_u32() -> u32 {
    1
}

impl ActionDesc {
    pub fn build(&self) -> Result<Action, ActionError> {
        Ok(match self {
            ActionDesc::FinitelyGenerated { size, generators } => {
                let gens = generators
                    .iter()
                    .map(|g| Ok((g.permutation.build(*size)?, g.sequence.clone())))
                    .collect::<Result<Vec<_>, ActionError>>()?;
                Action::Fg(FgAction::new(*size, gens)?)
            }
            ActionDesc::RotationBy { function } => Action::Fg(rotation_by(&function.compile()?)?),
            ActionDesc::Dilation { modulus, power } => Action::Dilation(DilationAction::new(*modulus, *power)?),
            ActionDesc::FourierRotation { function } => Action::Fourier(FourierRotationAction::new(function)?),
        })
    }
}

/// Observable descriptions accepted in configs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ObservableDesc {
    Constant {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    /// `x ↦ e(k x / size)`.
    Character {
        k: i64,
    },
    /// `x ↦ e(x / size)`; on a two-point space this is `F(x) = x` on `{±1}`.
    Identity,
    /// Indicator of `lo ≤ x < hi`.
    Interval {
        lo: usize,
        hi: usize,
    },
    /// Indicator of the listed points.
    Set {
        points: Vec<usize>,
    },
    Values {
        values: Vec<f64>,
    },
    Fourier {
        coefficients: BTreeMap<i64, Complex64>,
    },
}

impl ObservableDesc {
    pub fn build(&self, action: &Action) -> Result<Observable, ActionError> {
        let size = action.size();
        let need = || size.ok_or(ActionError::WrongObservable);
        Ok(match self {
            ObservableDesc::Constant { re, im } => match size {
                Some(s) => Observable::constant(s, Complex64::new(*re, *im)),
                None => Observable::Fourier(BTreeMap::from([(0, Complex64::new(*re, *im))])),
            },
            ObservableDesc::Character { k } => match size {
                Some(s) => character(s, *k),
                None => Observable::basis(*k),
            },
            ObservableDesc::Identity => match size {
                Some(s) => character(s, 1),
                None => Observable::basis(1),
            },
            ObservableDesc::Interval { lo, hi } => {
                let s = need()?;
                Observable::indicator(s, |x| *lo <= x && x < *hi)
            }
            ObservableDesc::Set { points } => {
                let s = need()?;
                let set: std::collections::BTreeSet<_> = points.iter().copied().collect();
                Observable::indicator(s, |x| set.contains(&x))
            }
            ObservableDesc::Values { values } => {
                if Some(values.len()) != size {
                    return Err(ActionError::WrongObservable);
                }
                Observable::from_real(values.iter().copied())
            }
            ObservableDesc::Fourier { coefficients } => {
                if size.is_some() {
                    return Err(ActionError::WrongObservable);
                }
                Observable::Fourier(coefficients.clone())
            }
        })
    }
}

/// `x ↦ e(k x / size)` on `Z_size`.
pub fn character(size: usize, k: i64) -> Observable {
    Observable::Vector(
        (0..size)
            .map(|x| {
                crate::numtheory::root_of_unity((k as i128 * x as i128).rem_euclid(size as i128) as i64, size as u64)
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multfn::MultiplicativeFunctionSpec as S;

    fn liouville_rotation() -> Action {
        Action::Fg(rotation_by(&S::Liouville.compile().unwrap()).unwrap())
    }

    #[test]
    fn liouville_apply() {
        let act = liouville_rotation();
        let f = character(2, 1);
        assert_eq!(f, Observable::from_real([1.0, -1.0]));
        let g = act.apply((4, 3), &f).unwrap();
        assert_eq!(g, f.scale(Complex64::new(-1.0, 0.0)));
        assert_eq!(act.apply((1, 1), &f).unwrap(), f);
    }

    #[test]
    fn trivial_action() {
        let act = Action::Fg(FgAction::trivial(5));
        let f = Observable::from_real([1.0, 2.0, 3.0, 4.0, 5.0]);
        assert_eq!(act.apply((6, 35), &f).unwrap(), f);
        assert_eq!(invariant_expectation(&act, &f).unwrap(), f);
        let single = FgAction::new(3, vec![(Permutation::identity(3), CompletelyAdditiveSequence::omega())]).unwrap();
        let act = Action::Fg(single);
        let f = Observable::from_real([1.0, 2.0, 3.0]);
        assert_eq!(act.apply((12, 5), &f).unwrap(), f);
    }

    #[test]
    fn dilation_apply() {
        let act = Action::Dilation(DilationAction::new(7, 1).unwrap());
        let f = character(7, 1);
        let g = act.apply((3, 1), &f).unwrap();
        let v = f.as_vector().unwrap();
        for (x, z) in g.as_vector().unwrap().iter().enumerate() {
            assert_eq!(*z, v[3 * x % 7]);
        }
        assert!((g.l2_norm() - f.l2_norm()).abs() < 1e-15);
        assert!(matches!(act.apply((14, 1), &f), Err(ActionError::NonInvertible(14))));
        let back = act.apply((1, 3), &g).unwrap();
        assert_eq!(back, f);
        assert!(DilationAction::new(8, 1).is_err());
    }

    #[test]
    fn dilation_preimage() {
        let m = 10007usize;
        let act = Action::Dilation(DilationAction::new(m as u64, 1).unwrap());
        let a = Observable::indicator(m, |x| m / 3 <= x && x < 2 * m / 3);
        let pre = preimage_set(&act, (2, 1), &a).unwrap();
        assert!(pre.is_indicator());
        assert_eq!(pre.integral(), a.integral());
        for (x, z) in pre.as_vector().unwrap().iter().enumerate() {
            let y = 2 * x % m;
            assert_eq!(z.re == 1.0, m / 3 <= y && y < 2 * m / 3);
        }
        assert_eq!(preimage_set(&act, (1, 1), &a).unwrap(), a);
    }

    #[test]
    fn invariant_expectation_examples() {
        let act = liouville_rotation();
        let e = invariant_expectation(&act, &character(2, 1)).unwrap();
        assert_eq!(e, Observable::from_real([0.0, 0.0]));
        let dil = Action::Dilation(DilationAction::new(7, 1).unwrap());
        assert!(invariant_expectation(&dil, &character(7, 1)).is_err());
    }

    #[test]
    fn partitions() {
        let f = Observable::from_real([1.0, 2.0, 3.0, 6.0]);
        assert_eq!(conditional_expectation(&f, &Partition::singletons(4)).unwrap(), f);
        assert_eq!(
            conditional_expectation(&f, &Partition::trivial(4)).unwrap(),
            Observable::constant(4, Complex64::new(3.0, 0.0))
        );
        let p = Partition::from_cells(4, &[vec![0, 3], vec![1, 2]]).unwrap();
        assert_eq!(
            conditional_expectation(&f, &p).unwrap(),
            Observable::from_real([3.5, 2.5, 2.5, 3.5])
        );
        assert!(Partition::from_cells(4, &[vec![0, 1], vec![1, 2, 3]]).is_err());
        assert!(Partition::from_cells(4, &[vec![0, 1]]).is_err());
    }

    #[test]
    fn fourier_rotation() {
        let act = Action::Fourier(FourierRotationAction::new(&S::Archimedean { t: 1.0 }).unwrap());
        let e1 = Observable::basis(1);
        let g = act.apply((3, 2), &e1).unwrap();
        let want = Complex64::from_polar(1.0, 1.5f64.ln());
        assert!((g.inner(&e1).unwrap() - want).norm() < 1e-12);
        assert!((g.l2_norm() - 1.0).abs() < 1e-12);
        assert!(act.apply((3, 2), &character(3, 1)).is_err());
    }

    #[test]
    fn progression_codes() {
        let act = liouville_rotation();
        let codes = act.codes_on_progression(3, 1, 1000).unwrap();
        for (i, c) in codes.iter().enumerate() {
            assert_eq!(*c, Some(act.code(3 * (i as u128 + 1) + 1).unwrap()));
        }
        let big = act.codes_on_progression(46_656, 1, 200).unwrap();
        for (i, c) in big.iter().enumerate() {
            assert_eq!(*c, Some(act.code(46_656 * (i as u128 + 1) + 1).unwrap()));
        }
        let dil = Action::Dilation(DilationAction::new(7, 2).unwrap());
        let codes = dil.codes_on_progression(1, 0, 14).unwrap();
        assert_eq!(codes[6], None);
        assert_eq!(codes[2], Some(3));
    }

    #[test]
    fn descriptions_round_trip() {
        let desc: ActionDesc = serde_json::from_str(
            r#"{"kind":"finitely-generated","size":3,"generators":[{"permutation":{"kind":"cycle"},"sequence":{"kind":"table","default":1}}]}"#,
        )
        .unwrap();
        let act = desc.build().unwrap();
        assert_eq!(act.size(), Some(3));
        let back: ActionDesc = serde_json::from_str(&serde_json::to_string(&desc).unwrap()).unwrap();
        assert_eq!(back, desc);
        assert!(serde_json::from_str::<ActionDesc>(r#"{"kind":"dilation","modulus":7,"bogus":1}"#).is_err());
        let rot: ActionDesc =
            serde_json::from_str(r#"{"kind":"rotation-by","function":{"kind":"liouville"}}"#).unwrap();
        assert_eq!(rot.build().unwrap().size(), Some(2));
    }
}
