use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::primality::{is_prime, pollard_brent, MAX_FACTOR_INPUT, RHO_SEED};
use super::sieve::{primes_up_to, FactorTable};
use super::NumTheoryError;

/// Trial division bound used by [`factorize`] before switching to rho.
const TRIAL_BOUND: u64 = 1 << 12;

/// Exact factorization `value = ∏ p^e`, primes strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factorization {
    value: u128,
    factors: Vec<(u128, u32)>,
}

impl Factorization {
    pub fn one() -> Self {
        Self {
            value: 1,
            factors: Vec::new(),
        }
    }

    /// Builds from unsorted prime powers, merging repeated primes.
    pub(crate) fn from_parts(value: u128, mut parts: Vec<(u128, u32)>) -> Self {
        parts.sort_unstable();
        let mut factors: Vec<(u128, u32)> = Vec::with_capacity(parts.len());
        for (p, e) in parts {
            match factors.last_mut() {
                Some((q, f)) if *q == p => *f += e,
                _ => factors.push((p, e)),
            }
        }
        Self { value, factors }
    }

    pub fn value(&self) -> u128 {
        self.value
    }

    pub fn factors(&self) -> &[(u128, u32)] {
        &self.factors
    }

    /// Ω: prime factors counted with multiplicity.
    pub fn omega(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    /// Multiplies the factors back out.
    pub fn product(&self) -> BigUint {
        self.factors
            .iter()
            .fold(BigUint::from(1u32), |acc, &(p, e)| acc * BigUint::from(p).pow(e))
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|&(p, e)| if e == 1 { p.to_string() } else { format!("{p}^{e}") })
            .collect();
        write!(f, "{}", parts.join(" * "))
    }
}

pub(crate) fn small_primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(TRIAL_BOUND))
}

/// Factors `n` exactly. Uses `table` when it covers `n`; otherwise trial
/// division by small primes, then Miller–Rabin and seeded rho splitting.
pub fn factorize(n: u128, table: Option<&FactorTable>) -> Result<Factorization, NumTheoryError> {
    if n == 0 {
        return Err(NumTheoryError::Zero);
    }
    if n > MAX_FACTOR_INPUT {
        return Err(NumTheoryError::TooLarge(n.to_string()));
    }
    if let Some(t) = table {
        if t.covers(n) {
            let mut parts = Vec::new();
            t.for_each_prime_power(n as u64, |p, e| parts.push((p as u128, e)));
            return Ok(Factorization {
                value: n,
                factors: parts,
            });
        }
    }
    let mut parts = Vec::new();
    let mut rest = n;
    for &p in small_primes() {
        let p = p as u128;
        if p * p > rest {
            break;
        }
        if rest.is_multiple_of(p) {
            let mut e = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                e += 1;
            }
            parts.push((p, e));
        }
    }
    if rest > 1 {
        split_cofactor(rest, TRIAL_BOUND as u128, &mut parts);
    }
    Ok(Factorization::from_parts(n, parts))
}

/// Factors a big integer, rejecting values above 2^96.
pub fn factorize_big(n: &BigUint, table: Option<&FactorTable>) -> Result<Factorization, NumTheoryError> {
    let v = n.to_u128().ok_or_else(|| NumTheoryError::TooLarge(n.to_string()))?;
    factorize(v, table)
}

/// Fully splits `m`, whose prime factors all exceed `trial_bound`, pushing
/// prime powers onto `out`.
pub(crate) fn split_cofactor(m: u128, trial_bound: u128, out: &mut Vec<(u128, u32)>) {
    if m == 1 {
        return;
    }
    if m < (trial_bound + 1) * (trial_bound + 1) || is_prime(m) {
        out.push((m, 1));
        return;
    }
    if let Some(r) = exact_square_root(m) {
        let mut inner = Vec::new();
        split_cofactor(r, trial_bound, &mut inner);
        out.extend(inner.into_iter().map(|(p, e)| (p, 2 * e)));
        return;
    }
    let d = pollard_brent(m, RHO_SEED ^ (m as u64));
    split_cofactor(d, trial_bound, out);
    split_cofactor(m / d, trial_bound, out);
}

fn exact_square_root(m: u128) -> Option<u128> {
    let mut r = (m as f64).sqrt() as u128;
    while r * r > m {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= m {
        r += 1;
    }
    (r * r == m).then_some(r)
}

/// Ω(n).
pub fn omega(n: u128, table: Option<&FactorTable>) -> Result<u32, NumTheoryError> {
    if let Some(t) = table {
        if n >= 1 && t.covers(n) {
            return Ok(t.omega(n as u64));
        }
    }
    Ok(factorize(n, table)?.omega())
}

/// Liouville λ(n) = (−1)^Ω(n).
pub fn liouville(n: u128, table: Option<&FactorTable>) -> Result<i8, NumTheoryError> {
    Ok(if omega(n, table)? % 2 == 0 { 1 } else { -1 })
}
