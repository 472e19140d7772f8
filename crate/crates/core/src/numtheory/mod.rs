//! Sieves, factorization, Ω, Liouville and Dirichlet characters.

use std::sync::{Arc, OnceLock, RwLock};

pub mod characters;
pub mod factor;
pub mod primality;
pub mod progression;
pub mod sieve;

pub use characters::{dirichlet_characters, euler_phi, root_of_unity, DirichletCharacterTable};
pub use factor::{factorize, factorize_big, liouville, omega, Factorization};
pub use primality::{is_prime, mod_inverse, DETERMINISTIC_MR_BOUND, MAX_FACTOR_INPUT};
pub use progression::{progression_factorize, DEFAULT_PROGRESSION_BOUND};
pub use sieve::{primes_up_to, FactorTable, CACHE_MAGIC, MAX_TABLE_ENTRIES};

#[derive(Debug, thiserror::Error)]
pub enum NumTheoryError {
    #[error("sieve limit {0} is below 2")]
    LimitTooSmall(u64),
    #[error("sieve limit {limit} needs more than {max_entries} entries")]
    LimitTooLarge { limit: u64, max_entries: u64 },
    #[error("invalid sieve cache: {0}")]
    BadCache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("cannot factor zero")]
    Zero,
    #[error("{0} exceeds the factorization bound 2^96")]
    TooLarge(String),
    #[error("invalid progression {q}n + {b}: first term is below 1")]
    InvalidProgression { q: String, b: String },
}

/// Largest table [`shared_table`] builds on its own.
pub const AUTO_TABLE_LIMIT: u64 = 1 << 25;

fn slot() -> &'static RwLock<Option<Arc<FactorTable>>> {
    static SLOT: OnceLock<RwLock<Option<Arc<FactorTable>>>> = OnceLock::new();
    SLOT.get_or_init(|| RwLock::new(None))
}

/// Installs a process-wide table (e.g. loaded from a sieve cache).
pub fn install_table(table: FactorTable) -> Arc<FactorTable> {
    let t = Arc::new(table);
    *slot().write().expect("table lock") = Some(t.clone());
    t
}

/// Returns the shared table, growing it to cover `limit` when that stays
/// within [`AUTO_TABLE_LIMIT`]. `None` when `limit` is beyond the automatic cap
/// and no large enough table was installed.
pub fn shared_table(limit: u64) -> Option<Arc<FactorTable>> {
    if let Some(t) = slot().read().expect("table lock").as_ref() {
        if t.limit() >= limit {
            return Some(t.clone());
        }
    }
    if limit > AUTO_TABLE_LIMIT {
        return None;
    }
    let mut w = slot().write().expect("table lock");
    if let Some(t) = w.as_ref() {
        if t.limit() >= limit {
            return Some(t.clone());
        }
    }
    let target = limit.max(1 << 16).next_power_of_two().min(AUTO_TABLE_LIMIT);
    let t = Arc::new(FactorTable::build(target).expect("within guard"));
    *w = Some(t.clone());
    Some(t)
}
