//! Φ_K, Q_K, S_K, S_δ and multiplicative Følner sets.

use std::collections::HashSet;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::linforms::{LinearForm, RationalPolynomialFL};
use crate::numtheory::primes_up_to;
use crate::par;

/// Largest set [`phi_k`] and [`folner_sequence`] will enumerate.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FolnerError {
    #[error("K must be at least 2, got {0}")]
    InvalidK(u32),
    #[error("set has {size} elements, above the enumeration limit {limit}; use the sampler")]
    EnumerationTooLarge { size: String, limit: u64 },
    #[error("{0} is outside [1, Q_K]")]
    OutOfRange(String),
    #[error("trivial linear form")]
    TrivialForm,
    #[error("δ must be positive and finite, got {0}")]
    InvalidDelta(f64),
    #[error("R must have degree 0, got {0}")]
    NotDegreeZero(i64),
    #[error("R({0}, {1}) is undefined")]
    Undefined(i64, i64),
    #[error("R({0}, {1}) is not positive")]
    NonPositive(i64, i64),
    #[error("S_δ,R membership needs a rational polynomial")]
    MissingPolynomial,
}

/// `Q = ∏ p^{a_p}` over [`support_primes`] with `K < a_p ≤ 2K`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FolnerElement {
    pub k: u32,
    pub value: BigUint,
    pub exponents: Vec<(u64, u32)>,
}

impl FolnerElement {
    fn from_exponents(k: u32, exponents: Vec<(u64, u32)>) -> Self {
        let value = exponents
            .iter()
            .fold(BigUint::one(), |acc, &(p, a)| acc * BigUint::from(p).pow(a));
        Self { k, value, exponents }
    }

    pub fn to_u128(&self) -> Option<u128> {
        self.value.to_u128()
    }

    pub fn is_valid(&self) -> bool {
        let primes = support_primes(self.k);
        primes.len() == self.exponents.len()
            && primes
                .iter()
                .zip(&self.exponents)
                .all(|(&p, &(q, a))| p == q && a > self.k && a <= 2 * self.k)
            && self.value
                == self
                    .exponents
                    .iter()
                    .fold(BigUint::one(), |acc, &(p, a)| acc * BigUint::from(p).pow(a))
    }
}

/// Primes indexing the sets at level `K`: all `p ≤ max(K, 3)`.
///
/// For `K ≥ 3` this is `p ≤ K`; at `K = 2` the prime 3 is kept as well, so
/// that `Q_2 = 2^4·3^4`.
pub fn support_primes(k: u32) -> Vec<u64> {
    primes_up_to(k.max(3) as u64)
}

fn check_k(k: u32) -> Result<Vec<u64>, FolnerError> {
    if k < 2 {
        return Err(FolnerError::InvalidK(k));
    }
    Ok(support_primes(k))
}

fn enumerate_box(primes: &[u64], lo: u32, hi: u32, limit: u64) -> Result<Vec<Vec<(u64, u32)>>, FolnerError> {
    let width = (hi - lo + 1) as u64;
    let size = BigUint::from(width).pow(primes.len() as u32);
    if size > BigUint::from(limit) {
        return Err(FolnerError::EnumerationTooLarge {
            size: size.to_string(),
            limit,
        });
    }
    let size = size.to_u64().unwrap_or(0);
    Ok((0..size)
        .map(|mut idx| {
            let mut exps = vec![(0u64, 0u32); primes.len()];
            for (slot, &p) in exps.iter_mut().zip(primes).rev() {
                *slot = (p, lo + (idx % width) as u32);
                idx /= width;
            }
            exps
        })
        .collect())
}

/// All of Φ_K, exponent vectors in lexicographic order.
pub fn phi_k(k: u32) -> Result<Vec<FolnerElement>, FolnerError> {
    let primes = check_k(k)?;
    let guard = BigUint::from(k as u64 + 1).pow(primes.len() as u32);
    if guard > BigUint::from(ENUMERATION_LIMIT) {
        return Err(FolnerError::EnumerationTooLarge {
            size: guard.to_string(),
            limit: ENUMERATION_LIMIT,
        });
    }
    Ok(enumerate_box(&primes, k + 1, 2 * k, ENUMERATION_LIMIT)?
        .into_iter()
        .map(|e| FolnerElement::from_exponents(k, e))
        .collect())
}

/// Uniform sampler over exponent vectors of Φ_K.
pub struct PhiKSampler {
    k: u32,
    primes: Vec<u64>,
    rng: ChaCha8Rng,
}

impl PhiKSampler {
    pub fn new(k: u32, seed: u64) -> Result<Self, FolnerError> {
        Ok(Self {
            k,
            primes: check_k(k)?,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }
}

impl Iterator for PhiKSampler {
    type Item = FolnerElement;
    fn next(&mut self) -> Option<FolnerElement> {
        let k = self.k;
        let exps = self
            .primes
            .iter()
            .map(|&p| (p, self.rng.gen_range(k + 1..=2 * k)))
            .collect();
        Some(FolnerElement::from_exponents(k, exps))
    }
}

/// Either all of Φ_K (when small) or `samples` draws from the seeded sampler.
pub fn phi_k_elements(k: u32, samples: usize, seed: u64) -> Result<Vec<FolnerElement>, FolnerError> {
    match phi_k(k) {
        Ok(all) if all.len() <= samples.max(1) => Ok(all),
        Ok(_) | Err(FolnerError::EnumerationTooLarge { .. }) => {
            Ok(PhiKSampler::new(k, seed)?.take(samples.max(1)).collect())
        }
        Err(e) => Err(e),
    }
}

/// `Q_K = ∏_{p ≤ K} p^{2K}`.
pub fn q_k(k: u32) -> Result<BigUint, FolnerError> {
    let primes = check_k(k)?;
    Ok(primes
        .iter()
        .fold(BigUint::one(), |acc, &p| acc * BigUint::from(p).pow(2 * k)))
}

fn divisible_by_some_power(v: &BigInt, primes: &[u64], k: u32) -> bool {
    primes.iter().any(|&p| (v % BigInt::from(p).pow(k)).is_zero())
}

/// `p^K ∤ a` for every prime `p ≤ K`.
pub fn in_s_k(a: &BigUint, k: u32) -> Result<bool, FolnerError> {
    let q = q_k(k)?;
    if a.is_zero() || a > &q {
        return Err(FolnerError::OutOfRange(a.to_string()));
    }
    let primes = support_primes(k);
    Ok(!divisible_by_some_power(&BigInt::from(a.clone()), &primes, k))
}

/// `p^K ∤ L_j(a, b)` for every `p ≤ K` and every form.
pub fn in_s_k_forms(a: &BigUint, b: &BigUint, k: u32, forms: &[LinearForm]) -> Result<bool, FolnerError> {
    let q = q_k(k)?;
    for x in [a, b] {
        if x.is_zero() || x > &q {
            return Err(FolnerError::OutOfRange(x.to_string()));
        }
    }
    if forms.iter().any(|f| f.alpha == 0 && f.beta == 0) {
        return Err(FolnerError::TrivialForm);
    }
    let primes = support_primes(k);
    let (a, b) = (BigInt::from(a.clone()), BigInt::from(b.clone()));
    Ok(forms.iter().all(|f| {
        let v = BigInt::from(f.alpha) * &a + BigInt::from(f.beta) * &b;
        !divisible_by_some_power(&v, &primes, k)
    }))
}

/// An exact density `count / total` next to its closed form.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactDensity {
    pub count: u64,
    pub total: u64,
    pub closed_form: BigRational,
}

impl ExactDensity {
    pub fn ratio(&self) -> BigRational {
        BigRational::new(self.count.into(), self.total.into())
    }
}

/// `|S_K ∩ [Q_K]|` by exhaustive count, with `∏_{p ≤ K}(1 − p^{−K})`.
pub fn s_k_density(k: u32) -> Result<ExactDensity, FolnerError> {
    let primes = check_k(k)?;
    let q = q_k(k)?;
    let total = q
        .to_u64()
        .filter(|&t| t <= 1 << 32)
        .ok_or_else(|| FolnerError::EnumerationTooLarge {
            size: q.to_string(),
            limit: 1 << 32,
        })?;
    let powers: Vec<u64> = primes.iter().map(|&p| p.pow(k)).collect();
    let counts = par::map_chunks(total as usize, 1 << 16, |r| {
        r.filter(|&i| powers.iter().all(|&pk| !(i as u64 + 1).is_multiple_of(pk)))
            .count() as u64
    });
    let closed_form = primes.iter().fold(BigRational::one(), |acc, &p| {
        acc * (BigRational::one() - BigRational::new(1.into(), BigInt::from(p).pow(k)))
    });
    Ok(ExactDensity {
        count: counts.iter().sum(),
        total,
        closed_form,
    })
}

fn form_ok_mod(forms: &[LinearForm], a: i128, b: i128, pk: i128) -> bool {
    forms
        .iter()
        .all(|f| (f.alpha as i128 * a + f.beta as i128 * b) % pk != 0)
}

/// Exhaustive count of `(a, b) ∈ [Q_K]²` in `S_{K; forms}`.
pub fn s_k_forms_count(k: u32, forms: &[LinearForm]) -> Result<(u64, u64), FolnerError> {
    let primes = check_k(k)?;
    let q = q_k(k)?;
    let qv = q
        .to_u64()
        .filter(|&t| t * t <= 1 << 28)
        .ok_or_else(|| FolnerError::EnumerationTooLarge {
            size: (&q * &q).to_string(),
            limit: 1 << 28,
        })?;
    let powers: Vec<i128> = primes.iter().map(|&p| p.pow(k) as i128).collect();
    let counts = par::map_chunks(qv as usize, 64, |rows| {
        let mut c = 0u64;
        for a in rows {
            let a = a as i128 + 1;
            for b in 1..=qv as i128 {
                if powers.iter().all(|&pk| form_ok_mod(forms, a, b, pk)) {
                    c += 1;
                }
            }
        }
        c
    });
    Ok((counts.iter().sum(), qv * qv))
}

/// Density of `S_{K; forms}` in `[Q_K]²`, exactly, via CRT over each `p^K`.
pub fn s_k_forms_density(k: u32, forms: &[LinearForm]) -> Result<BigRational, FolnerError> {
    let primes = check_k(k)?;
    if forms.iter().any(|f| f.alpha == 0 && f.beta == 0) {
        return Err(FolnerError::TrivialForm);
    }
    let mut acc = BigRational::one();
    for &p in &primes {
        let pk = p.pow(k) as i128;
        if pk * pk > 1 << 32 {
            return Err(FolnerError::EnumerationTooLarge {
                size: (pk * pk).to_string(),
                limit: 1 << 32,
            });
        }
        let good: u64 = par::map_chunks(pk as usize, 256, |rows| {
            let mut c = 0u64;
            for a in rows {
                for b in 0..pk {
                    if form_ok_mod(forms, a as i128, b, pk) {
                        c += 1;
                    }
                }
            }
            c
        })
        .iter()
        .sum();
        acc *= BigRational::new(good.into(), BigInt::from(pk * pk));
    }
    Ok(acc)
}

/// `S_δ = {n : |n^i − 1| ≤ δ}`, optionally with a rational polynomial for `S_{δ,R}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SdeltaSpec {
    pub delta: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<RationalPolynomialFL>,
}

impl SdeltaSpec {
    pub fn new(delta: f64) -> Result<Self, FolnerError> {
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(FolnerError::InvalidDelta(delta));
        }
        Ok(Self { delta, r: None })
    }

    pub fn with_polynomial(delta: f64, r: RationalPolynomialFL) -> Result<Self, FolnerError> {
        let mut s = Self::new(delta)?;
        if r.degree() != 0 {
            return Err(FolnerError::NotDegreeZero(r.degree()));
        }
        s.r = Some(r);
        Ok(s)
    }

    /// `2|sin(ln n / 2)| ≤ δ`.
    pub fn contains(&self, n: u128) -> bool {
        phase_within((n as f64).ln(), self.delta)
    }

    /// Membership of `R(m, n)` in `S_δ`.
    pub fn contains_r(&self, m: i64, n: i64) -> Result<bool, FolnerError> {
        let r = self.r.as_ref().ok_or(FolnerError::MissingPolynomial)?;
        Ok(phase_within(ln_rp(r, m, n)?, self.delta))
    }
}

#[inline]
fn phase_within(ln: f64, delta: f64) -> bool {
    2.0 * (ln / 2.0).sin().abs() <= delta
}

fn ln_big(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        x.to_f64().unwrap_or(f64::INFINITY).ln()
    } else {
        let shift = bits - 900;
        (x >> shift).to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
    }
}

/// `ln R(m, n)`, rejecting undefined and nonpositive values.
pub fn ln_rp(r: &RationalPolynomialFL, m: i64, n: i64) -> Result<f64, FolnerError> {
    let mut ln = ln_big(r.constant().numer()) - ln_big(r.constant().denom());
    let mut negative = false;
    let mut zero = false;
    for &(f, k) in r.factors() {
        let v = f.eval(m, n);
        if v == 0 {
            if k < 0 {
                return Err(FolnerError::Undefined(m, n));
            }
            zero = true;
            continue;
        }
        if v < 0 && k % 2 != 0 {
            negative = !negative;
        }
        ln += k as f64 * (v.unsigned_abs() as f64).ln();
    }
    if zero || negative {
        return Err(FolnerError::NonPositive(m, n));
    }
    Ok(ln)
}

pub fn s_delta_contains(n: u128, spec: &SdeltaSpec) -> bool {
    spec.contains(n)
}

pub fn s_delta_r_contains(m: i64, n: i64, spec: &SdeltaSpec) -> Result<bool, FolnerError> {
    spec.contains_r(m, n)
}

/// `(|S_δ ∩ [N]|, N)`.
pub fn s_delta_count(n: usize, spec: &SdeltaSpec) -> (usize, usize) {
    let counts = par::map_chunks(n, 1 << 16, |r| r.filter(|&i| spec.contains(i as u128 + 1)).count());
    (counts.iter().sum(), n)
}

/// `(|{(m, n) ∈ [N]² : R(m, n) ∈ S_δ}|, N²)`; points where `R` is not positive count as outside.
pub fn s_delta_r_count(n: usize, spec: &SdeltaSpec) -> Result<(usize, usize), FolnerError> {
    if spec.r.is_none() {
        return Err(FolnerError::MissingPolynomial);
    }
    let counts = par::map_chunks(n, 16, |rows| {
        let mut c = 0;
        for m in rows {
            for k in 1..=n {
                if spec.contains_r(m as i64 + 1, k as i64).unwrap_or(false) {
                    c += 1;
                }
            }
        }
        c
    });
    Ok((counts.iter().sum(), n * n))
}

/// Which multiplicative Følner set to build at index `K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FolnerKind {
    /// `∏_{p ≤ K} p^{a_p}` with `a ≤ a_p ≤ b`.
    IntervalProducts {
        a: u32,
        b: u32,
    },
    /// Interval products with `a_K = start`, `b_K = start + K`.
    Window {
        start: u32,
    },
    PhiK,
}

pub fn folner_sequence(kind: FolnerKind, k: u32) -> Result<Vec<BigUint>, FolnerError> {
    let primes = check_k(k)?;
    let (lo, hi) = match kind {
        FolnerKind::IntervalProducts { a, b } => (a, b.max(a)),
        FolnerKind::Window { start } => (start, start + k),
        FolnerKind::PhiK => return Ok(phi_k(k)?.into_iter().map(|e| e.value).collect()),
    };
    Ok(enumerate_box(&primes, lo, hi, ENUMERATION_LIMIT)?
        .into_iter()
        .map(|e| FolnerElement::from_exponents(k, e).value)
        .collect())
}

/// `(|Φ ∩ xΦ|, |Φ|)`.
pub fn dilation_overlap(set: &[BigUint], x: u64) -> (usize, usize) {
    let members: HashSet<&BigUint> = set.iter().collect();
    let x = BigUint::from(x);
    let hits = set
        .iter()
        .filter(|y| (*y % &x).is_zero() && members.contains(&(*y / &x)))
        .count();
    (hits, set.len())
}
