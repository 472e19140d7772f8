use num_complex::Complex64;

use super::ActionError;
use crate::numtheory::primality::pow_mod;
use crate::numtheory::{is_prime, mod_inverse};

/// `T_n x = n^k x mod M` on `Z_M`, `M` prime.
///
/// Group elements are encoded by the residue of `n` mod `M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DilationAction {
    modulus: u64,
    power: u32,
}

impl DilationAction {
    pub fn new(modulus: u64, power: u32) -> Result<Self, ActionError> {
        if !is_prime(modulus as u128) {
            return Err(ActionError::NotPrime(modulus));
        }
        if power == 0 {
            return Err(ActionError::InvalidPower);
        }
        if modulus > u32::MAX as u64 {
            return Err(ActionError::GroupTooLarge);
        }
        Ok(Self { modulus, power })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn power(&self) -> u32 {
        self.power
    }

    pub fn size(&self) -> usize {
        self.modulus as usize
    }

    pub fn identity_code(&self) -> u128 {
        1
    }

    pub fn code(&self, n: u128) -> Result<u128, ActionError> {
        let r = n % self.modulus as u128;
        if r == 0 {
            return Err(ActionError::NonInvertible(n));
        }
        Ok(r)
    }

    pub fn compose(&self, a: u128, b: u128) -> u128 {
        a * b % self.modulus as u128
    }

    pub fn pow(&self, a: u128, k: i64) -> u128 {
        let m = self.modulus as u128;
        let base = if k < 0 {
            mod_inverse(a, m).expect("nonzero residue mod a prime is invertible")
        } else {
            a
        };
        pow_mod(base, k.unsigned_abs() as u128, m)
    }

    /// The multiplier `n^k mod M` for a code.
    pub fn multiplier(&self, code: u128) -> u64 {
        pow_mod(code, self.power as u128, self.modulus as u128) as u64
    }

    pub fn map_point(&self, code: u128, x: usize) -> usize {
        ((self.multiplier(code) as u128 * x as u128) % self.modulus as u128) as usize
    }

    pub fn apply_code(&self, code: u128, f: &[Complex64]) -> Vec<Complex64> {
        let s = self.multiplier(code) as u128;
        let m = self.modulus as u128;
        (0..self.modulus as u128).map(|x| f[(s * x % m) as usize]).collect()
    }
}
