use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use super::ActionError;
use crate::multfn::MultiplicativeFunction;
use crate::numtheory::{factorize, is_prime, primes_up_to, shared_table, AUTO_TABLE_LIMIT};

/// Largest group (product of generator orders) an [`FgAction`] may encode.
pub const MAX_GROUP_SIZE: u128 = 1 << 62;
const MAX_PERIOD: u64 = 1 << 20;

/// `a(mn) = a(m) + a(n)`, given by its values at primes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CompletelyAdditiveSequence {
    /// Listed primes get their own value, every other prime gets `default`.
    Table {
        #[serde(default)]
        values: BTreeMap<u64, i64>,
        #[serde(default)]
        default: i64,
    },
    /// `a(p)` depends on `p mod modulus` except at the `special` primes.
    Periodic {
        modulus: u64,
        classes: BTreeMap<u64, i64>,
        #[serde(default)]
        special: BTreeMap<u64, i64>,
    },
}

impl CompletelyAdditiveSequence {
    /// `Ω(n)`, the number of prime factors with multiplicity.
    pub fn omega() -> Self {
        Self::Table {
            values: BTreeMap::new(),
            default: 1,
        }
    }

    pub fn zero() -> Self {
        Self::Table {
            values: BTreeMap::new(),
            default: 0,
        }
    }

    pub fn validate(&self) -> Result<(), ActionError> {
        let bad = |s: String| Err(ActionError::InvalidSequence(s));
        match self {
            Self::Table { values, .. } => {
                if let Some(p) = values.keys().find(|&&p| !is_prime(p as u128)) {
                    return bad(format!("{p} is not prime"));
                }
            }
            Self::Periodic {
                modulus,
                classes,
                special,
            } => {
                if *modulus == 0 || *modulus > MAX_PERIOD {
                    return bad(format!("modulus {modulus} out of range"));
                }
                if let Some(p) = special.keys().find(|&&p| !is_prime(p as u128)) {
                    return bad(format!("{p} is not prime"));
                }
                for r in 0..*modulus {
                    if r.gcd(modulus) == 1 && !classes.contains_key(&r) {
                        return bad(format!("no value for the class {r} mod {modulus}"));
                    }
                }
                if let Some(r) = classes.keys().find(|&&r| r >= *modulus) {
                    return bad(format!("class {r} is not reduced mod {modulus}"));
                }
                let f = factorize(*modulus as u128, None).map_err(|e| ActionError::InvalidSequence(e.to_string()))?;
                if let Some(&(p, _)) = f.factors().iter().find(|(p, _)| !special.contains_key(&(*p as u64))) {
                    return bad(format!("prime {p} divides the modulus but has no value"));
                }
            }
        }
        Ok(())
    }

    pub fn prime_value(&self, p: u128) -> i64 {
        match self {
            Self::Table { values, default } => u64::try_from(p)
                .ok()
                .and_then(|p| values.get(&p).copied())
                .unwrap_or(*default),
            Self::Periodic {
                modulus,
                classes,
                special,
            } => {
                if let Some(v) = u64::try_from(p).ok().and_then(|p| special.get(&p)) {
                    return *v;
                }
                classes.get(&((p % *modulus as u128) as u64)).copied().unwrap_or(0)
            }
        }
    }

    pub fn eval_factors(&self, factors: &[(u128, u32)]) -> i64 {
        factors.iter().map(|&(p, e)| self.prime_value(p) * e as i64).sum()
    }

    pub fn eval(&self, n: u128) -> Result<i64, ActionError> {
        Ok(self.eval_factors(factorize(n, None)?.factors()))
    }

    /// Primes whose value is listed explicitly.
    fn listed(&self) -> Vec<u64> {
        match self {
            Self::Table { values, .. } => values.keys().copied().collect(),
            Self::Periodic { special, .. } => special.keys().copied().collect(),
        }
    }

    fn period(&self) -> u64 {
        match self {
            Self::Table { .. } => 1,
            Self::Periodic { modulus, .. } => *modulus,
        }
    }
}

/// A permutation of `0..size` together with its cycle decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Permutation {
    map: Vec<u32>,
    cycle_of: Vec<u32>,
    pos: Vec<u32>,
    cycles: Vec<Vec<u32>>,
    order: u64,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self, ActionError> {
        let size = map.len();
        let mut seen = vec![false; size];
        for &y in &map {
            if y >= size || std::mem::replace(&mut seen[y], true) {
                return Err(ActionError::NotAPermutation(size));
            }
        }
        let map: Vec<u32> = map.into_iter().map(|y| y as u32).collect();
        let mut cycle_of = vec![u32::MAX; size];
        let mut pos = vec![0u32; size];
        let mut cycles = Vec::new();
        let mut order: u128 = 1;
        for start in 0..size {
            if cycle_of[start] != u32::MAX {
                continue;
            }
            let id = cycles.len() as u32;
            let mut cyc = Vec::new();
            let mut x = start as u32;
            loop {
                cycle_of[x as usize] = id;
                pos[x as usize] = cyc.len() as u32;
                cyc.push(x);
                x = map[x as usize];
                if x as usize == start {
                    break;
                }
            }
            order = order.lcm(&(cyc.len() as u128)).min(MAX_GROUP_SIZE + 1);
            cycles.push(cyc);
        }
        Ok(Self {
            map,
            cycle_of,
            pos,
            cycles,
            order: order as u64,
        })
    }

    pub fn identity(size: usize) -> Self {
        Self::new((0..size).collect()).expect("identity is a permutation")
    }

    /// `x ↦ x + shift mod size`.
    pub fn shift(size: usize, shift: i64) -> Self {
        let s = shift.rem_euclid(size.max(1) as i64) as usize;
        Self::new((0..size).map(|x| (x + s) % size).collect()).expect("shift is a permutation")
    }

    /// The product of the given disjoint cycles; unlisted points are fixed.
    pub fn from_cycles(size: usize, cycles: &[Vec<usize>]) -> Result<Self, ActionError> {
        let mut map: Vec<usize> = (0..size).collect();
        let mut used = vec![false; size];
        for c in cycles {
            for (i, &x) in c.iter().enumerate() {
                if x >= size || std::mem::replace(&mut used[x], true) {
                    return Err(ActionError::NotAPermutation(size));
                }
                map[x] = c[(i + 1) % c.len()];
            }
        }
        Self::new(map)
    }

    pub fn size(&self) -> usize {
        self.map.len()
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn image(&self, x: usize) -> usize {
        self.map[x] as usize
    }

    /// `S^e x`.
    #[inline]
    pub fn power_apply(&self, e: i64, x: usize) -> usize {
        let cyc = &self.cycles[self.cycle_of[x] as usize];
        let len = cyc.len() as i64;
        let p = (self.pos[x] as i64 + e.rem_euclid(len)) % len;
        cyc[p as usize] as usize
    }

    pub fn commutes_with(&self, other: &Permutation) -> bool {
        (0..self.size()).all(|x| self.image(other.image(x)) == other.image(self.image(x)))
    }
}

/// `T_n = S₁^{a₁(n)} ··· S_ℓ^{a_ℓ(n)}` for commuting permutations `S_j`.
///
/// Group elements are encoded as mixed-radix integers over the exponent
/// vectors reduced modulo the generator orders.
#[derive(Clone, Debug)]
pub struct FgAction {
    size: usize,
    perms: Vec<Permutation>,
    seqs: Vec<CompletelyAdditiveSequence>,
    radix: Vec<u128>,
    group_size: u128,
}

impl FgAction {
    pub fn new(size: usize, generators: Vec<(Permutation, CompletelyAdditiveSequence)>) -> Result<Self, ActionError> {
        if size == 0 {
            return Err(ActionError::EmptySpace);
        }
        let mut radix = Vec::with_capacity(generators.len());
        let mut group_size: u128 = 1;
        for (p, s) in &generators {
            if p.size() != size {
                return Err(ActionError::SpaceMismatch {
                    left: size,
                    right: p.size(),
                });
            }
            s.validate()?;
            radix.push(group_size);
            group_size = group_size
                .checked_mul(p.order() as u128)
                .filter(|&g| g <= MAX_GROUP_SIZE)
                .ok_or(ActionError::GroupTooLarge)?;
        }
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if !generators[i].0.commutes_with(&generators[j].0) {
                    return Err(ActionError::NonCommuting(i, j));
                }
            }
        }
        let (perms, seqs) = generators.into_iter().unzip();
        Ok(Self {
            size,
            perms,
            seqs,
            radix,
            group_size,
        })
    }

    pub fn trivial(size: usize) -> Self {
        Self::new(size, Vec::new()).expect("trivial action")
    }

    /// Cyclic shift by one on `Z_size`, driven by `seq`.
    pub fn shift(size: usize, seq: CompletelyAdditiveSequence) -> Result<Self, ActionError> {
        Self::new(size, vec![(Permutation::shift(size, 1), seq)])
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn group_size(&self) -> u128 {
        self.group_size
    }

    pub fn generators(&self) -> impl Iterator<Item = (&Permutation, &CompletelyAdditiveSequence)> {
        self.perms.iter().zip(&self.seqs)
    }

    pub fn identity_code(&self) -> u128 {
        0
    }

    pub fn encode(&self, exps: &[i64]) -> u128 {
        exps.iter()
            .zip(&self.perms)
            .zip(&self.radix)
            .map(|((&e, p), &r)| e.rem_euclid(p.order() as i64) as u128 * r)
            .sum()
    }

    pub fn decode(&self, code: u128) -> Vec<i64> {
        self.perms
            .iter()
            .zip(&self.radix)
            .map(|(p, &r)| ((code / r) % p.order() as u128) as i64)
            .collect()
    }

    pub fn compose(&self, a: u128, b: u128) -> u128 {
        let mut out = 0;
        for (p, &r) in self.perms.iter().zip(&self.radix) {
            let o = p.order() as u128;
            out += ((a / r % o + b / r % o) % o) * r;
        }
        out
    }

    pub fn pow(&self, a: u128, k: i64) -> u128 {
        let mut out = 0;
        for (p, &r) in self.perms.iter().zip(&self.radix) {
            let o = p.order() as i128;
            let d = (a / r) as i128 % o;
            out += ((d * (k as i128 % o)).rem_euclid(o)) as u128 * r;
        }
        out
    }

    pub fn code_of_factors(&self, factors: &[(u128, u32)]) -> u128 {
        let e: Vec<i64> = self.seqs.iter().map(|s| s.eval_factors(factors)).collect();
        self.encode(&e)
    }

    /// Code of `T_n`.
    pub fn code(&self, n: u128) -> Result<u128, ActionError> {
        if n == 0 {
            return Err(ActionError::NonPositive);
        }
        if self.perms.is_empty() {
            return Ok(0);
        }
        if n <= AUTO_TABLE_LIMIT as u128 {
            if let Some(t) = shared_table(n as u64) {
                return Ok(self.code_with_table(n as u64, &t));
            }
        }
        Ok(self.code_of_factors(factorize(n, None)?.factors()))
    }

    pub(crate) fn code_with_table(&self, n: u64, table: &crate::numtheory::FactorTable) -> u128 {
        let mut buf = [(0u128, 0u32); 24];
        let mut len = 0;
        table.for_each_prime_power(n, |p, e| {
            buf[len] = (p as u128, e);
            len += 1;
        });
        self.code_of_factors(&buf[..len])
    }

    #[inline]
    pub fn map_point_exps(&self, exps: &[i64], mut x: usize) -> usize {
        for (p, &e) in self.perms.iter().zip(exps) {
            x = p.power_apply(e, x);
        }
        x
    }

    pub fn map_point(&self, code: u128, x: usize) -> usize {
        self.map_point_exps(&self.decode(code), x)
    }

    /// `x ↦ T x` for every point.
    pub fn permutation(&self, code: u128) -> Vec<usize> {
        let e = self.decode(code);
        (0..self.size).map(|x| self.map_point_exps(&e, x)).collect()
    }

    /// `F ∘ T`.
    pub fn apply_code(&self, code: u128, f: &[Complex64]) -> Vec<Complex64> {
        let e = self.decode(code);
        (0..self.size).map(|x| f[self.map_point_exps(&e, x)]).collect()
    }

    /// Codes of the distinct `T_p`, `p` prime.
    pub fn prime_generator_codes(&self) -> Result<Vec<u128>, ActionError> {
        let mut period: u64 = 1;
        let mut listed = BTreeSet::new();
        for s in &self.seqs {
            period = period.lcm(&s.period());
            if period > MAX_PERIOD {
                return Err(ActionError::GroupTooLarge);
            }
            listed.extend(s.listed());
        }
        let mut codes = BTreeSet::new();
        for &p in &listed {
            let e: Vec<i64> = self.seqs.iter().map(|s| s.prime_value(p as u128)).collect();
            codes.insert(self.encode(&e));
        }
        // Each unit class contains infinitely many primes, hence unlisted ones.
        for r in 0..period {
            if r.gcd(&period) != 1 {
                continue;
            }
            let e: Vec<i64> = self
                .seqs
                .iter()
                .map(|s| match s {
                    CompletelyAdditiveSequence::Table { default, .. } => *default,
                    CompletelyAdditiveSequence::Periodic { modulus, classes, .. } => {
                        classes.get(&(r % modulus)).copied().unwrap_or(0)
                    }
                })
                .collect();
            codes.insert(self.encode(&e));
        }
        Ok(codes.into_iter().collect())
    }

    /// Orbit label of every point under the group generated by all `T_p`.
    pub fn orbits(&self) -> Result<Vec<usize>, ActionError> {
        let mut parent: Vec<usize> = (0..self.size).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for g in self.prime_generator_codes()? {
            let e = self.decode(g);
            for x in 0..self.size {
                let y = self.map_point_exps(&e, x);
                let (a, b) = (find(&mut parent, x), find(&mut parent, y));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        Ok((0..self.size).map(|x| find(&mut parent, x)).collect())
    }
}

/// Cyclic shift on `Z_d` realizing a finitely generated unimodular `f` whose
/// prime values are `d`-th roots of unity: `a(p)` is the discrete log of `f(p)`.
pub fn rotation_by(f: &MultiplicativeFunction) -> Result<FgAction, ActionError> {
    let not_rot = |why: String| ActionError::NotARotation(why);
    if !f.is_unimodular() {
        return Err(not_rot("f is not unimodular".into()));
    }
    let structure = f
        .prime_structure()
        .ok_or_else(|| not_rot("f is not finitely generated".into()))?;
    let q = structure.modulus;
    if q > MAX_PERIOD {
        return Err(ActionError::GroupTooLarge);
    }
    let mut reps: BTreeMap<u64, u64> = BTreeMap::new();
    let units = (0..q).filter(|r| r.gcd(&q) == 1).count();
    let mut bound = 1000u64.max(20 * q);
    while reps.len() < units {
        for p in primes_up_to(bound) {
            if !structure.special.contains(&p) {
                reps.entry(p % q).or_insert(p);
            }
        }
        if reps.len() < units {
            bound *= 4;
        }
    }
    let phase = |p: u64| {
        f.prime_phase(p as u128)
            .ok_or_else(|| not_rot(format!("f({p}) is not a root of unity of small order")))
    };
    let class_phases: Vec<(u64, num_rational::Ratio<i64>)> = reps
        .iter()
        .map(|(&r, &p)| phase(p).map(|ph| (r, ph)))
        .collect::<Result<_, _>>()?;
    let special_phases: Vec<(u64, num_rational::Ratio<i64>)> = structure
        .special
        .iter()
        .map(|&p| phase(p).map(|ph| (p, ph)))
        .collect::<Result<_, _>>()?;
    let d = class_phases
        .iter()
        .chain(&special_phases)
        .fold(1i64, |acc, (_, ph)| acc.lcm(ph.denom()));
    let log = |ph: &num_rational::Ratio<i64>| ph.numer() * (d / ph.denom());
    let seq = CompletelyAdditiveSequence::Periodic {
        modulus: q,
        classes: class_phases.iter().map(|(r, ph)| (*r, log(ph))).collect(),
        special: special_phases.iter().map(|(p, ph)| (*p, log(ph))).collect(),
    };
    FgAction::shift(d as usize, seq)
}
