//! Modular arithmetic on `u128`, deterministic Miller–Rabin and Brent's
//! variant of Pollard rho.

use num_integer::Integer;

/// Largest input accepted by the factorization routines (2^96).
pub const MAX_FACTOR_INPUT: u128 = 1u128 << 96;

/// Miller–Rabin with the first 13 prime bases is deterministic below this value.
pub const DETERMINISTIC_MR_BOUND: u128 = 3_317_044_064_679_887_385_961_981;

const MR_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];
// Extra bases for the (probable-prime) range between the bound above and 2^96.
const MR_EXTRA_BASES: [u64; 7] = [43, 47, 53, 59, 61, 67, 71];

/// Default seed for the rho iteration.
pub const RHO_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
pub fn mul_mod(a: u128, b: u128, m: u128) -> u128 {
    debug_assert!(m > 0);
    if m <= u64::MAX as u128 {
        return (a % m) * (b % m) % m;
    }
    let a = a % m;
    let b = b % m;
    if let Some(p) = a.checked_mul(b) {
        return p % m;
    }
    // Horner over 32-bit limbs of b; m < 2^96 keeps every step inside u128.
    if m < (1u128 << 96) {
        let mut r: u128 = 0;
        for shift in [96u32, 64, 32, 0] {
            let limb = (b >> shift) & 0xffff_ffff;
            r = (r << 32) % m;
            r = (r + a * limb % m) % m;
        }
        return r;
    }
    // Generic double-and-add fallback.
    let mut r: u128 = 0;
    let mut x = a;
    let mut y = b;
    while y > 0 {
        if y & 1 == 1 {
            r = add_mod(r, x, m);
        }
        x = add_mod(x, x, m);
        y >>= 1;
    }
    r
}

#[inline]
fn add_mod(a: u128, b: u128, m: u128) -> u128 {
    let (s, overflow) = a.overflowing_add(b);
    if overflow || s >= m {
        s.wrapping_sub(m)
    } else {
        s
    }
}

pub fn pow_mod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let mut acc: u128 = 1;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn strong_probable_prime(n: u128, base: u128, d: u128, s: u32) -> bool {
    let a = base % n;
    if a == 0 {
        return true;
    }
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Primality test. Deterministic below [`DETERMINISTIC_MR_BOUND`]; above it
/// the answer is a strong probable prime to 20 prime bases.
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        let p = p as u128;
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    let det = MR_BASES.iter().all(|&b| strong_probable_prime(n, b as u128, d, s));
    if !det || n < DETERMINISTIC_MR_BOUND {
        return det;
    }
    MR_EXTRA_BASES
        .iter()
        .all(|&b| strong_probable_prime(n, b as u128, d, s))
}

/// Finds a nontrivial divisor of the odd composite `n` using Brent's cycle
/// detection. Deterministic for a given `seed`.
pub fn pollard_brent(n: u128, seed: u64) -> u128 {
    debug_assert!(n > 3 && !is_prime(n));
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut state = seed;
    let mut next = move || {
        // splitmix64
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    loop {
        let c = (next() as u128) % (n - 1) + 1;
        let mut y = (next() as u128) % n;
        let f = |x: u128| add_mod(mul_mod(x, x, n), c, n);
        let batch = 128usize;
        let mut g = 1u128;
        let mut r = 1usize;
        let mut q = 1u128;
        let mut x = y;
        let mut ys = y;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..batch.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += batch;
            }
            r *= 2;
        }
        if g == n {
            // Backtrack one step at a time.
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n && g > 1 {
            return g;
        }
    }
}

pub fn mod_inverse(a: u128, m: u128) -> Option<u128> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u128)
}
