//! Completely multiplicative functions with values in the closed unit disk.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::folner::SdeltaSpec;
use crate::numtheory::{
    dirichlet_characters, euler_phi, primes_up_to, progression_factorize, shared_table, DirichletCharacterTable,
    FactorTable, Factorization, NumTheoryError, AUTO_TABLE_LIMIT,
};
use crate::par;
use crate::sum::{merge_complex, ComplexSum, Neumaier};

const UNIT_TOL: f64 = 1e-12;

#[derive(Debug, thiserror::Error)]
pub enum MultFnError {
    #[error("invalid function spec: {0}")]
    InvalidSpec(String),
    #[error("|f({0})| < 1, so f cannot be evaluated at rationals with {0} in the denominator")]
    NonUnimodularDivisor(u128),
    #[error("restriction leaves no n in [1, {0}]")]
    EmptyRestriction(usize),
    #[error(transparent)]
    NumTheory(#[from] NumTheoryError),
}

/// Serializable description of a completely multiplicative function.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "parameters", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MultiplicativeFunctionSpec {
    Liouville,
    DirichletCharacter {
        q: u64,
        index: usize,
    },
    /// Equals the character off primes dividing `q` and 1 on them.
    ModifiedDirichletCharacter {
        q: u64,
        index: usize,
    },
    /// `n ↦ n^{it}`.
    Archimedean {
        t: f64,
    },
    PrimeTable {
        #[serde(default)]
        values: BTreeMap<u64, Complex64>,
        #[serde(default = "unit")]
        default: Complex64,
    },
    /// `f(p) = e(1/log log p)` for `p ≥ 3`, `f(2) = 1`.
    OscillatoryLogLog,
    Power {
        base: Box<MultiplicativeFunctionSpec>,
        k: i64,
    },
    Product(Vec<MultiplicativeFunctionSpec>),
}

fn unit() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

impl MultiplicativeFunctionSpec {
    /// The constant function 1.
    pub fn one() -> Self {
        Self::PrimeTable {
            values: BTreeMap::new(),
            default: unit(),
        }
    }

    pub fn compile(&self) -> Result<MultiplicativeFunction, MultFnError> {
        Ok(MultiplicativeFunction {
            spec: self.clone(),
            node: Node::build(self)?,
        })
    }
}

/// `(modulus, special primes)`: off the special primes, `f(p)` depends only on `p mod modulus`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrimeStructure {
    pub modulus: u64,
    pub special: Vec<u64>,
}

impl PrimeStructure {
    fn merge(self, other: PrimeStructure) -> PrimeStructure {
        let mut special = self.special;
        special.extend(other.special);
        special.sort_unstable();
        special.dedup();
        PrimeStructure {
            modulus: self.modulus.lcm(&other.modulus),
            special,
        }
    }
}

#[derive(Clone, Debug)]
enum Node {
    Liouville,
    Character {
        table: Arc<DirichletCharacterTable>,
        modified: bool,
    },
    Archimedean(f64),
    Table {
        values: BTreeMap<u64, Complex64>,
        default: Complex64,
    },
    LogLog,
    Power(Box<Node>, i64),
    Product(Vec<Node>),
}

fn character(q: u64, index: usize) -> Result<Arc<DirichletCharacterTable>, MultFnError> {
    if q == 0 {
        return Err(MultFnError::InvalidSpec("character modulus must be positive".into()));
    }
    if q > 1 << 20 {
        return Err(MultFnError::InvalidSpec(format!("character modulus {q} is too large")));
    }
    let phi = euler_phi(q);
    if index as u64 >= phi {
        return Err(MultFnError::InvalidSpec(format!(
            "character index {index} out of range (there are {phi} characters mod {q})"
        )));
    }
    let mut all = dirichlet_characters(q);
    Ok(Arc::new(all.swap_remove(index)))
}

/// Exact rational phase of a unit complex number with small denominator.
fn detect_phase(z: Complex64) -> Option<Ratio<i64>> {
    if (z.norm() - 1.0).abs() > UNIT_TOL {
        return None;
    }
    let theta = z.arg() / std::f64::consts::TAU;
    for d in 1..=720i64 {
        let k = (theta * d as f64).round();
        if (theta * d as f64 - k).abs() < 1e-9 {
            let r = Ratio::new(k as i64, d);
            return Some(reduce_phase(r));
        }
    }
    None
}

fn reduce_phase(r: Ratio<i64>) -> Ratio<i64> {
    let d = *r.denom();
    Ratio::new(r.numer().rem_euclid(d), d)
}

impl Node {
    fn build(spec: &MultiplicativeFunctionSpec) -> Result<Node, MultFnError> {
        use MultiplicativeFunctionSpec as S;
        Ok(match spec {
            S::Liouville => Node::Liouville,
            S::DirichletCharacter { q, index } => Node::Character {
                table: character(*q, *index)?,
                modified: false,
            },
            S::ModifiedDirichletCharacter { q, index } => Node::Character {
                table: character(*q, *index)?,
                modified: true,
            },
            S::Archimedean { t } => {
                if !t.is_finite() {
                    return Err(MultFnError::InvalidSpec("t must be finite".into()));
                }
                Node::Archimedean(*t)
            }
            S::PrimeTable { values, default } => {
                for (&p, v) in values {
                    if !crate::numtheory::is_prime(p as u128) {
                        return Err(MultFnError::InvalidSpec(format!("{p} is not prime")));
                    }
                    if v.norm() > 1.0 + UNIT_TOL {
                        return Err(MultFnError::InvalidSpec(format!("|f({p})| > 1")));
                    }
                }
                if default.norm() > 1.0 + UNIT_TOL {
                    return Err(MultFnError::InvalidSpec("|default| > 1".into()));
                }
                Node::Table {
                    values: values.clone(),
                    default: *default,
                }
            }
            S::OscillatoryLogLog => Node::LogLog,
            S::Power { base, k } => {
                let b = Node::build(base)?;
                if *k < 0 && !b.is_unimodular() {
                    return Err(MultFnError::InvalidSpec(
                        "negative powers need a unimodular base".into(),
                    ));
                }
                Node::Power(Box::new(b), *k)
            }
            S::Product(parts) => Node::Product(parts.iter().map(Node::build).collect::<Result<_, _>>()?),
        })
    }

    fn is_unimodular(&self) -> bool {
        match self {
            Node::Character { table, modified } => *modified || table.modulus() == 1,
            Node::Table { values, default } => {
                (default.norm() - 1.0).abs() <= UNIT_TOL && values.values().all(|v| (v.norm() - 1.0).abs() <= UNIT_TOL)
            }
            Node::Power(b, _) => b.is_unimodular(),
            Node::Product(ps) => ps.iter().all(Node::is_unimodular),
            _ => true,
        }
    }

    fn needs_factorization(&self) -> bool {
        match self {
            Node::Archimedean(_) => false,
            Node::Power(b, _) => b.needs_factorization(),
            Node::Product(ps) => ps.iter().any(Node::needs_factorization),
            _ => true,
        }
    }

    fn prime_value(&self, p: u128) -> Complex64 {
        match self {
            Node::Liouville => Complex64::new(-1.0, 0.0),
            Node::Character { table, modified } => {
                if *modified && (table.modulus() as u128).is_multiple_of(p) {
                    unit()
                } else {
                    table.value(p)
                }
            }
            Node::Archimedean(t) => Complex64::from_polar(1.0, t * (p as f64).ln()),
            Node::Table { values, default } => u64::try_from(p)
                .ok()
                .and_then(|p| values.get(&p).copied())
                .unwrap_or(*default),
            Node::LogLog => {
                if p == 2 {
                    unit()
                } else {
                    let ll = (p as f64).ln().ln();
                    Complex64::from_polar(1.0, std::f64::consts::TAU / ll)
                }
            }
            Node::Power(b, k) => b.prime_value(p).powi(*k as i32),
            Node::Product(ps) => ps.iter().map(|n| n.prime_value(p)).product(),
        }
    }

    fn eval(&self, n: u128, factors: &[(u128, u32)]) -> Complex64 {
        match self {
            Node::Liouville => {
                let omega: u32 = factors.iter().map(|&(_, e)| e).sum();
                if omega.is_multiple_of(2) {
                    unit()
                } else {
                    Complex64::new(-1.0, 0.0)
                }
            }
            Node::Archimedean(t) => Complex64::from_polar(1.0, t * (n as f64).ln()),
            Node::Power(b, k) => b.eval(n, factors).powi(*k as i32),
            Node::Product(ps) => ps.iter().map(|x| x.eval(n, factors)).product(),
            _ => factors
                .iter()
                .map(|&(p, e)| self.prime_value(p).powi(e as i32))
                .product(),
        }
    }

    fn phase(&self, p: u128) -> Option<Ratio<i64>> {
        match self {
            Node::Liouville => Some(Ratio::new(1, 2)),
            Node::Character { table, modified } => {
                if *modified && (table.modulus() as u128).is_multiple_of(p) {
                    Some(Ratio::from_integer(0))
                } else {
                    table.phase(p).map(|(k, d)| Ratio::new(k as i64, d as i64))
                }
            }
            Node::Archimedean(t) if *t == 0.0 => Some(Ratio::from_integer(0)),
            Node::Table { .. } => detect_phase(self.prime_value(p)),
            Node::Power(b, k) => b.phase(p).map(|r| reduce_phase(r * *k)),
            Node::Product(ps) => ps
                .iter()
                .map(|x| x.phase(p))
                .try_fold(Ratio::from_integer(0), |acc, r| r.map(|r| reduce_phase(acc + r))),
            _ => None,
        }
    }

    fn structure(&self) -> Option<PrimeStructure> {
        match self {
            Node::Liouville => Some(PrimeStructure {
                modulus: 1,
                special: vec![],
            }),
            Node::Character { table, .. } => {
                let q = table.modulus();
                let special = crate::numtheory::factorize(q as u128, None)
                    .ok()?
                    .factors()
                    .iter()
                    .map(|&(p, _)| p as u64)
                    .collect();
                Some(PrimeStructure { modulus: q, special })
            }
            Node::Archimedean(t) if *t == 0.0 => Some(PrimeStructure {
                modulus: 1,
                special: vec![],
            }),
            Node::Table { values, .. } => Some(PrimeStructure {
                modulus: 1,
                special: values.keys().copied().collect(),
            }),
            Node::Power(b, _) => b.structure(),
            Node::Product(ps) => ps.iter().try_fold(
                PrimeStructure {
                    modulus: 1,
                    special: vec![],
                },
                |acc, x| x.structure().map(|s| acc.merge(s)),
            ),
            _ => None,
        }
    }
}

/// A validated, ready-to-evaluate multiplicative function.
#[derive(Clone, Debug)]
pub struct MultiplicativeFunction {
    spec: MultiplicativeFunctionSpec,
    node: Node,
}

impl MultiplicativeFunction {
    pub fn spec(&self) -> &MultiplicativeFunctionSpec {
        &self.spec
    }

    pub fn prime_value(&self, p: u128) -> Complex64 {
        self.node.prime_value(p)
    }

    /// `|f(p)| = 1` for every prime.
    pub fn is_unimodular(&self) -> bool {
        self.node.is_unimodular()
    }

    /// `f(p)` takes finitely many values, described by [`PrimeStructure`].
    pub fn prime_structure(&self) -> Option<PrimeStructure> {
        self.node.structure()
    }

    pub fn is_finitely_generated(&self) -> bool {
        self.prime_structure().is_some()
    }

    /// `f(p) = e(phase)` with an exact rational phase in `[0, 1)`, if known.
    pub fn prime_phase(&self, p: u128) -> Option<Ratio<i64>> {
        self.node.phase(p)
    }

    pub fn eval_factored(&self, f: &Factorization) -> Complex64 {
        self.node.eval(f.value(), f.factors())
    }

    pub fn eval_with_table(&self, n: u64, table: &FactorTable) -> Complex64 {
        if let Node::Liouville = self.node {
            return if table.omega(n).is_multiple_of(2) {
                unit()
            } else {
                Complex64::new(-1.0, 0.0)
            };
        }
        let mut buf = [(0u128, 0u32); 24];
        let mut len = 0;
        table.for_each_prime_power(n, |p, e| {
            buf[len] = (p as u128, e);
            len += 1;
        });
        self.node.eval(n as u128, &buf[..len])
    }

    pub fn eval(&self, n: u128) -> Result<Complex64, MultFnError> {
        if n == 0 {
            return Err(NumTheoryError::Zero.into());
        }
        if !self.node.needs_factorization() {
            return Ok(self.node.eval(n, &[]));
        }
        let table = if n <= AUTO_TABLE_LIMIT as u128 {
            shared_table(n as u64)
        } else {
            None
        };
        if let Some(t) = table {
            return Ok(self.eval_with_table(n as u64, &t));
        }
        Ok(self.eval_factored(&crate::numtheory::factorize(n, None)?))
    }

    /// `f(m/n) = f(m)·conj(f(n))`.
    pub fn eval_rational(&self, m: u128, n: u128) -> Result<Complex64, MultFnError> {
        if n == 0 || m == 0 {
            return Err(NumTheoryError::Zero.into());
        }
        if m == n {
            return Ok(unit());
        }
        for &(p, _) in crate::numtheory::factorize(n, None)?.factors() {
            if (self.prime_value(p).norm() - 1.0).abs() > UNIT_TOL {
                return Err(MultFnError::NonUnimodularDivisor(p));
            }
        }
        Ok(self.eval(m)? * self.eval(n)?.conj())
    }

    /// `f(a·n + b)` for `n = 1..=count`.
    pub fn progression_values(&self, a: u128, b: i128, count: usize) -> Result<Vec<Complex64>, MultFnError> {
        let top = crate::numtheory::progression::validate_progression(a, b, count)?;
        if count == 0 {
            return Ok(Vec::new());
        }
        let value = |n: usize| (a * n as u128).wrapping_add_signed(b);
        if !self.node.needs_factorization() {
            let parts = par::map_chunks(count, par::DEFAULT_CHUNK, |r| {
                r.map(|i| self.node.eval(value(i + 1), &[])).collect::<Vec<_>>()
            });
            return Ok(parts.into_iter().flatten().collect());
        }
        if top <= AUTO_TABLE_LIMIT as u128 {
            if let Some(t) = shared_table(top as u64) {
                let parts = par::map_chunks(count, par::DEFAULT_CHUNK, |r| {
                    r.map(|i| self.eval_with_table(value(i + 1) as u64, &t))
                        .collect::<Vec<_>>()
                });
                return Ok(parts.into_iter().flatten().collect());
            }
        }
        let facs = progression_factorize(a, b, count, None)?;
        let parts = par::map_ordered(&facs, |f| self.eval_factored(f));
        Ok(parts)
    }
}

/// A mean together with the number of terms it averages.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeanReport {
    pub value: Complex64,
    pub count: usize,
}

/// `(χ, t)`: the function `p ↦ χ(p)·p^{it}`.
#[derive(Clone, Debug)]
pub struct PretentiousTarget {
    pub chi: Arc<DirichletCharacterTable>,
    pub t: f64,
}

impl PretentiousTarget {
    pub fn new(chi: DirichletCharacterTable, t: f64) -> Self {
        Self { chi: Arc::new(chi), t }
    }

    /// Principal character mod 1 with `t = 0`, i.e. the constant 1.
    pub fn trivial() -> Self {
        Self::new(dirichlet_characters(1).remove(0), 0.0)
    }

    pub fn prime_value(&self, p: u128) -> Complex64 {
        let arch = if self.t == 0.0 {
            unit()
        } else {
            Complex64::from_polar(1.0, self.t * (p as f64).ln())
        };
        self.chi.value(p) * arch
    }
}

/// `Σ_{p ≤ P} (1 − Re f(p)·conj g(p)) / p`.
pub fn pretentious_distance_sq(f: &MultiplicativeFunction, g: &MultiplicativeFunction, big_p: u64) -> f64 {
    distance_sq_by(f, |p| g.prime_value(p), big_p)
}

/// Distance² from `f` to the function `p ↦ χ(p)p^{it}`.
pub fn distance_sq_to_target(f: &MultiplicativeFunction, target: &PretentiousTarget, big_p: u64) -> f64 {
    distance_sq_by(f, |p| target.prime_value(p), big_p)
}

fn distance_sq_by(f: &MultiplicativeFunction, g: impl Fn(u128) -> Complex64, big_p: u64) -> f64 {
    primes_up_to(big_p)
        .into_iter()
        .map(|p| {
            let p = p as u128;
            (1.0 - (f.prime_value(p) * g(p).conj()).re) / p as f64
        })
        .collect::<Neumaier>()
        .value()
}

/// `F_N(f, K) = Σ_{K < p ≤ N} (f(p)·conj χ(p)·p^{−it} − 1) / p`.
pub fn f_partial_sum(f: &MultiplicativeFunction, target: &PretentiousTarget, k: u64, n: u64) -> Complex64 {
    primes_up_to(n)
        .into_iter()
        .filter(|&p| p > k)
        .map(|p| {
            let p = p as u128;
            (f.prime_value(p) * target.prime_value(p).conj() - 1.0) / p as f64
        })
        .collect::<ComplexSum>()
        .value()
}

/// `E_{n ∈ [N]} f(a·n + b)`.
pub fn progression_mean(f: &MultiplicativeFunction, a: u128, b: i128, n: usize) -> Result<MeanReport, MultFnError> {
    let vals = f.progression_values(a, b, n)?;
    Ok(MeanReport {
        value: chunked_mean(&vals),
        count: n,
    })
}

fn chunked_mean(vals: &[Complex64]) -> Complex64 {
    if vals.is_empty() {
        return Complex64::new(0.0, 0.0);
    }
    let parts = par::map_chunks(vals.len(), par::DEFAULT_CHUNK, |r| {
        vals[r].iter().copied().collect::<ComplexSum>()
    });
    merge_complex(&parts) / vals.len() as f64
}

/// Mean of `f(a·n + b)` over `n ∈ S_δ ∩ [N]`.
pub fn restricted_mean(
    f: &MultiplicativeFunction,
    a: u128,
    b: i128,
    n: usize,
    restriction: &SdeltaSpec,
) -> Result<MeanReport, MultFnError> {
    let vals = f.progression_values(a, b, n)?;
    let kept: Vec<Complex64> = vals
        .iter()
        .enumerate()
        .filter(|(i, _)| restriction.contains(*i as u128 + 1))
        .map(|(_, v)| *v)
        .collect();
    if kept.is_empty() {
        return Err(MultFnError::EmptyRestriction(n));
    }
    Ok(MeanReport {
        value: chunked_mean(&kept),
        count: kept.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub q: u64,
    pub index: usize,
    pub t: f64,
    pub distance_sq: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    /// Every candidate, in (q, index, t) order.
    pub candidates: Vec<Candidate>,
    /// Smallest distance², or `None` when none falls below the threshold.
    pub best: Option<Candidate>,
}

/// Distances from `f` to every `χ·n^{it}` with `χ` mod some `q ∈ moduli` and
/// `t ∈ t_grid`. Only distances are reported; nothing is concluded about
/// aperiodicity.
pub fn classify(
    f: &MultiplicativeFunction,
    big_p: u64,
    moduli: &[u64],
    t_grid: &[f64],
    threshold: Option<f64>,
) -> Classification {
    let primes = primes_up_to(big_p);
    let mut jobs = Vec::new();
    for &q in moduli {
        for (index, chi) in dirichlet_characters(q).into_iter().enumerate() {
            let chi = Arc::new(chi);
            for &t in t_grid {
                jobs.push((q, index, chi.clone(), t));
            }
        }
    }
    let fvals: Vec<Complex64> = primes.iter().map(|&p| f.prime_value(p as u128)).collect();
    let candidates: Vec<Candidate> = par::map_ordered(&jobs, |(q, index, chi, t)| {
        let target = PretentiousTarget {
            chi: chi.clone(),
            t: *t,
        };
        let d = primes
            .iter()
            .zip(&fvals)
            .map(|(&p, fv)| (1.0 - (fv * target.prime_value(p as u128).conj()).re) / p as f64)
            .collect::<Neumaier>()
            .value();
        Candidate {
            q: *q,
            index: *index,
            t: *t,
            distance_sq: d,
        }
    });
    let best = candidates
        .iter()
        .filter(|c| threshold.is_none_or(|th| c.distance_sq < th))
        .min_by(|a, b| a.distance_sq.total_cmp(&b.distance_sq))
        .cloned();
    Classification { candidates, best }
}

#[cfg(test)]
mod tests {
    use super::*;
    use MultiplicativeFunctionSpec as S;

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn eval_examples() {
        let lam = S::Liouville.compile().unwrap();
        assert_eq!(lam.eval(12).unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(lam.eval(1).unwrap(), unit());
        let chi3 = S::ModifiedDirichletCharacter { q: 3, index: 1 }.compile().unwrap();
        assert_eq!(chi3.eval(6).unwrap(), Complex64::new(-1.0, 0.0));
        let arch = S::Archimedean { t: 1.0 }.compile().unwrap();
        let want = Complex64::from_polar(1.0, 100f64.ln());
        assert!(close(arch.eval(100).unwrap(), want, 1e-15));
    }

    #[test]
    fn rational_evaluation() {
        let lam = S::Liouville.compile().unwrap();
        assert_eq!(lam.eval_rational(4, 3).unwrap(), Complex64::new(-1.0, 0.0));
        assert_eq!(lam.eval_rational(7, 7).unwrap(), unit());
        let t = 0.7;
        let arch = S::Archimedean { t }.compile().unwrap();
        let got = arch.eval_rational(5, 3).unwrap();
        assert!(close(got, Complex64::from_polar(1.0, t * (5.0f64 / 3.0).ln()), 1e-12));
        let chi = S::DirichletCharacter { q: 3, index: 1 }.compile().unwrap();
        assert!(matches!(
            chi.eval_rational(2, 6),
            Err(MultFnError::NonUnimodularDivisor(3))
        ));
    }

    #[test]
    fn invalid_specs() {
        assert!(S::DirichletCharacter { q: 3, index: 2 }.compile().is_err());
        assert!(S::Power {
            base: Box::new(S::DirichletCharacter { q: 3, index: 1 }),
            k: -1
        }
        .compile()
        .is_err());
        let mut values = BTreeMap::new();
        values.insert(4, unit());
        assert!(S::PrimeTable {
            values,
            default: unit()
        }
        .compile()
        .is_err());
    }

    #[test]
    fn distance_examples() {
        let lam = S::Liouville.compile().unwrap();
        let one = S::one().compile().unwrap();
        let want = 2.0 * (0.5 + 1.0 / 3.0 + 0.2 + 1.0 / 7.0);
        assert!((pretentious_distance_sq(&lam, &one, 10) - want).abs() < 1e-12);
        assert!((want - 2.352381).abs() < 1e-6);
        assert_eq!(pretentious_distance_sq(&lam, &lam, 1000), 0.0);
    }

    #[test]
    fn partial_sum_examples() {
        let lam = S::Liouville.compile().unwrap();
        let got = f_partial_sum(&lam, &PretentiousTarget::trivial(), 2, 10);
        let want = -2.0 * (1.0 / 3.0 + 0.2 + 1.0 / 7.0);
        assert!((got.re - want).abs() < 1e-12 && got.im == 0.0);
        let chi = S::ModifiedDirichletCharacter { q: 3, index: 1 }.compile().unwrap();
        let target = PretentiousTarget::new(dirichlet_characters(3).remove(1), 0.0);
        assert_eq!(f_partial_sum(&chi, &target, 3, 10_000), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn progression_mean_examples() {
        let one = S::one().compile().unwrap();
        assert_eq!(progression_mean(&one, 7, 3, 500).unwrap().value, unit());
        let chi = S::DirichletCharacter { q: 3, index: 1 }.compile().unwrap();
        assert_eq!(progression_mean(&chi, 3, 1, 1000).unwrap().value, unit());
    }

    #[test]
    fn archimedean_mean_matches_asymptotic() {
        let arch = S::Archimedean { t: 1.0 }.compile().unwrap();
        let n = 1_000_000usize;
        let got = progression_mean(&arch, 1, 0, n).unwrap().value;
        let nit = Complex64::from_polar(1.0, (n as f64).ln());
        let want = nit / Complex64::new(1.0, 1.0);
        assert!((got - want).norm() <= 1e-3, "{}", (got - want).norm());
    }

    #[test]
    fn restricted_mean_examples() {
        let arch = S::Archimedean { t: 1.0 }.compile().unwrap();
        let all = SdeltaSpec::new(2.0).unwrap();
        let a = restricted_mean(&arch, 1, 0, 5000, &all).unwrap();
        let b = progression_mean(&arch, 1, 0, 5000).unwrap();
        assert_eq!(a.count, 5000);
        assert!((a.value - b.value).norm() < 1e-12);
        let tight = SdeltaSpec::new(0.1).unwrap();
        let r = restricted_mean(&arch, 1, 0, 1_000_000, &tight).unwrap();
        assert!(r.value.norm() >= 0.99);
    }

    #[test]
    fn classify_modified_character() {
        let chi = S::ModifiedDirichletCharacter { q: 3, index: 1 }.compile().unwrap();
        let c = classify(&chi, 1000, &[1, 3], &[0.0], None);
        let best = c.best.unwrap();
        assert_eq!((best.q, best.index), (3, 1));
        assert!((best.distance_sq - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn modified_character_composite_modulus() {
        let chi = S::ModifiedDirichletCharacter { q: 8, index: 0 }.compile().unwrap();
        assert!(close(chi.prime_value(2), unit(), 1e-15));
        assert!(close(chi.eval(12).unwrap(), unit(), 1e-15));
        let inv = S::Power {
            base: Box::new(S::ModifiedDirichletCharacter { q: 8, index: 0 }),
            k: -1,
        };
        assert!(inv.compile().unwrap().eval(16).unwrap().is_finite());
    }

    #[test]
    fn classify_archimedean_on_grid() {
        let f = S::Archimedean { t: 0.5 }.compile().unwrap();
        let c = classify(&f, 1000, &[1], &[0.0, 0.25, 0.5], None);
        let best = c.best.unwrap();
        assert_eq!(best.t, 0.5);
        assert!(best.distance_sq.abs() < 1e-12);
    }

    #[test]
    fn phases_and_structure() {
        let lam = S::Liouville.compile().unwrap();
        assert_eq!(lam.prime_phase(7), Some(Ratio::new(1, 2)));
        let chi = S::ModifiedDirichletCharacter { q: 7, index: 1 }.compile().unwrap();
        let s = chi.prime_structure().unwrap();
        assert_eq!(
            s,
            PrimeStructure {
                modulus: 7,
                special: vec![7]
            }
        );
        for p in [2u128, 3, 5, 7, 11, 13] {
            let ph = chi.prime_phase(p).unwrap();
            let z = root(ph);
            assert!(close(z, chi.prime_value(p), 1e-12));
        }
        assert!(S::Archimedean { t: 1.0 }.compile().unwrap().prime_structure().is_none());
    }

    fn root(r: Ratio<i64>) -> Complex64 {
        crate::numtheory::root_of_unity(*r.numer(), *r.denom() as u64)
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = S::Product(vec![
            S::Liouville,
            S::Power {
                base: Box::new(S::ModifiedDirichletCharacter { q: 5, index: 2 }),
                k: 3,
            },
            S::Archimedean { t: 0.25 },
        ]);
        let text = serde_json::to_string(&spec).unwrap();
        let back: MultiplicativeFunctionSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(back, spec);
        let parsed: MultiplicativeFunctionSpec = serde_json::from_str(r#"{"kind":"liouville"}"#).unwrap();
        assert_eq!(parsed, S::Liouville);
        assert!(serde_json::from_str::<MultiplicativeFunctionSpec>(
            r#"{"kind":"archimedean","parameters":{"t":1.0,"s":2}}"#
        )
        .is_err());
    }
}
