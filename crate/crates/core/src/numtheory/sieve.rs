use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::NumTheoryError;

/// Hard cap on table entries (limit + 1).
pub const MAX_TABLE_ENTRIES: u64 = 1 << 31;

/// Magic bytes opening a sieve cache file.
pub const CACHE_MAGIC: &[u8; 7] = b"MALSPF1";

/// Smallest-prime-factor table for `0..=limit`. Entries 0 and 1 hold 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorTable {
    limit: u32,
    spf: Vec<u32>,
    primes: Vec<u32>,
}

impl FactorTable {
    /// Linear sieve.
    pub fn build(limit: u64) -> Result<Self, NumTheoryError> {
        if limit < 2 {
            return Err(NumTheoryError::LimitTooSmall(limit));
        }
        if limit + 1 > MAX_TABLE_ENTRIES {
            return Err(NumTheoryError::LimitTooLarge {
                limit,
                max_entries: MAX_TABLE_ENTRIES,
            });
        }
        let n = limit as usize;
        let mut spf = vec![0u32; n + 1];
        let mut primes: Vec<u32> = Vec::with_capacity(estimate_prime_count(n));
        for i in 2..=n {
            if spf[i] == 0 {
                spf[i] = i as u32;
                primes.push(i as u32);
            }
            let si = spf[i];
            for &p in &primes {
                if p > si {
                    break;
                }
                let j = i * p as usize;
                if j > n {
                    break;
                }
                spf[j] = p;
            }
        }
        Ok(Self {
            limit: limit as u32,
            spf,
            primes,
        })
    }

    pub fn limit(&self) -> u64 {
        self.limit as u64
    }

    /// Smallest prime factor of `n` (0 for n < 2).
    #[inline]
    pub fn spf(&self, n: u64) -> u32 {
        self.spf[n as usize]
    }

    pub fn spf_slice(&self) -> &[u32] {
        &self.spf
    }

    /// All primes up to the limit, increasing.
    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.spf[n as usize] as u64 == n
    }

    #[inline]
    pub fn covers(&self, n: u128) -> bool {
        n <= self.limit as u128
    }

    /// Calls `f(p, e)` for each prime power exactly dividing `n`, in
    /// increasing order of `p`. `n` must be in `1..=limit`.
    #[inline]
    pub fn for_each_prime_power(&self, mut n: u64, mut f: impl FnMut(u64, u32)) {
        while n > 1 {
            let p = self.spf[n as usize] as u64;
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            f(p, e);
        }
    }

    /// Ω(n) via the table.
    #[inline]
    pub fn omega(&self, mut n: u64) -> u32 {
        let mut k = 0;
        while n > 1 {
            n /= self.spf[n as usize] as u64;
            k += 1;
        }
        k
    }

    /// Writes the binary cache: magic, limit (u64 LE), then one u32 LE per entry.
    pub fn write_cache(&self, path: &Path) -> Result<(), NumTheoryError> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&(self.limit as u64).to_le_bytes())?;
        for &v in &self.spf {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads and validates a cache written by [`FactorTable::write_cache`].
    pub fn read_cache(path: &Path) -> Result<Self, NumTheoryError> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 7];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(NumTheoryError::BadCache("wrong magic".into()));
        }
        let mut lim = [0u8; 8];
        r.read_exact(&mut lim)?;
        let limit = u64::from_le_bytes(lim);
        if !(2..MAX_TABLE_ENTRIES).contains(&limit) {
            return Err(NumTheoryError::BadCache(format!("limit {limit} out of range")));
        }
        let entries = limit as usize + 1;
        let mut bytes = vec![0u8; entries * 4];
        r.read_exact(&mut bytes)?;
        let mut trailing = [0u8; 1];
        if r.read(&mut trailing)? != 0 {
            return Err(NumTheoryError::BadCache("trailing bytes".into()));
        }
        let spf: Vec<u32> = bytes
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        if spf[0] != 0 || spf[1] != 0 {
            return Err(NumTheoryError::BadCache("entries 0 and 1 must be zero".into()));
        }
        let mut primes = Vec::new();
        for (n, &p) in spf.iter().enumerate().skip(2) {
            if p < 2 || n % p as usize != 0 {
                return Err(NumTheoryError::BadCache(format!("invalid entry at {n}")));
            }
            if p as usize == n {
                primes.push(p);
            }
        }
        Ok(Self {
            limit: limit as u32,
            spf,
            primes,
        })
    }
}

fn estimate_prime_count(n: usize) -> usize {
    if n < 17 {
        return 8;
    }
    let x = n as f64;
    (1.26 * x / x.ln()) as usize
}

/// Plain Eratosthenes list of primes up to `limit`, used for trial division.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}
