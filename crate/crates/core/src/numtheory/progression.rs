use std::sync::OnceLock;

use super::factor::{split_cofactor, Factorization};
use super::primality::{mod_inverse, MAX_FACTOR_INPUT};
use super::sieve::primes_up_to;
use super::NumTheoryError;
use crate::par;

/// Upper limit on the default trial-division bound.
pub const DEFAULT_PROGRESSION_BOUND: u64 = 1_000_000;

const CHUNK: usize = 1 << 15;

fn sieving_primes() -> &'static [u64] {
    static P: OnceLock<Vec<u64>> = OnceLock::new();
    P.get_or_init(|| primes_up_to(DEFAULT_PROGRESSION_BOUND))
}

fn isqrt(n: u128) -> u128 {
    let mut r = (n as f64).sqrt() as u128;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Checks `q ≥ 1`, `q + b ≥ 1` and `q·count + b ≤ 2^96`; returns the largest term.
pub(crate) fn validate_progression(q: u128, b: i128, count: usize) -> Result<u128, NumTheoryError> {
    if q == 0 || (q as i128).checked_add(b).is_none_or(|v| v < 1) {
        return Err(NumTheoryError::InvalidProgression {
            q: q.to_string(),
            b: b.to_string(),
        });
    }
    let top = q
        .checked_mul(count.max(1) as u128)
        .and_then(|v| v.checked_add_signed(b))
        .filter(|&v| v <= MAX_FACTOR_INPUT)
        .ok_or_else(|| NumTheoryError::TooLarge(format!("{q}*{count}+{b}")))?;
    Ok(top)
}

/// Factorizations of `q·n + b` for `n = 1..=count`, in order.
///
/// Every term is trial-divided along the progression by the primes up to
/// `bound` (default `min(√(q·count + b), 10^6)`); leftover cofactors are
/// certified prime or split with rho.
pub fn progression_factorize(
    q: u128,
    b: i128,
    count: usize,
    bound: Option<u64>,
) -> Result<Vec<Factorization>, NumTheoryError> {
    let top = validate_progression(q, b, count)?;
    if count == 0 {
        return Ok(Vec::new());
    }
    let default_bound = isqrt(top).min(DEFAULT_PROGRESSION_BOUND as u128) as u64;
    let bound = bound.unwrap_or(default_bound).max(1);
    let owned;
    let primes: &[u64] = if bound <= DEFAULT_PROGRESSION_BOUND {
        let all = sieving_primes();
        let end = all.partition_point(|&p| p <= bound);
        &all[..end]
    } else {
        owned = primes_up_to(bound);
        &owned
    };

    let chunks = par::map_chunks(count, CHUNK, |range| {
        factor_chunk(q, b, range.start as u128 + 1, range.len(), primes, bound as u128)
    });
    Ok(chunks.into_iter().flatten().collect())
}

fn factor_chunk(q: u128, b: i128, first_n: u128, len: usize, primes: &[u64], bound: u128) -> Vec<Factorization> {
    let value = |n: u128| (q * n).wrapping_add_signed(b);
    let mut rest: Vec<u128> = (0..len as u128).map(|i| value(first_n + i)).collect();
    let mut parts: Vec<Vec<(u128, u32)>> = vec![Vec::new(); len];

    let strip = |i: usize, p: u128, rest: &mut [u128], parts: &mut [Vec<(u128, u32)>]| {
        let mut e = 0;
        while rest[i].is_multiple_of(p) {
            rest[i] /= p;
            e += 1;
        }
        if e > 0 {
            parts[i].push((p, e));
        }
    };

    for &p in primes {
        let p = p as u128;
        let qr = q % p;
        let br = b.rem_euclid(p as i128) as u128;
        if qr == 0 {
            if br == 0 {
                for i in 0..len {
                    strip(i, p, &mut rest, &mut parts);
                }
            }
            continue;
        }
        // q·n ≡ −b (mod p)
        let inv = mod_inverse(qr, p).expect("p is prime and does not divide q");
        let n0 = ((p - br) % p) * inv % p;
        let offset = (n0 + p - first_n % p) % p;
        let mut i = offset as usize;
        while i < len {
            strip(i, p, &mut rest, &mut parts);
            i += p as usize;
        }
    }

    (0..len)
        .map(|i| {
            let mut f = std::mem::take(&mut parts[i]);
            split_cofactor(rest[i], bound, &mut f);
            Factorization::from_parts(value(first_n + i as u128), f)
        })
        .collect()
}
