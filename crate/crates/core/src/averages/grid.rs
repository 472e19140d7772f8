//! Histograms of group elements over two-dimensional grids.
//!
//! Every iterate `T_{R(m,n)}` with `R = c·∏ L_j^{k_j}` is reduced to a group
//! code. Linear forms restricted to a grid are one-dimensional progressions,
//! so each factor is tabulated once along its progression and the grid scan
//! only composes table entries. Counts are integers, so the resulting
//! histogram is exact and independent of how the scan is split.

use std::collections::{BTreeMap, HashMap};

use num_integer::Integer;
use num_traits::ToPrimitive;

use super::AveragesError;
use crate::actions::{Action, CompletelyAdditiveSequence};
use crate::linforms::{Grid2D, LinearForm, RationalPolynomialFL};
use crate::numtheory::{progression_factorize, shared_table, AUTO_TABLE_LIMIT};
use crate::par;

const ROWS_PER_CHUNK: usize = 8;
const DENSE_LIMIT: u128 = 1 << 20;
pub const MAX_ITERATES: usize = 16;

/// Something that assigns a composable code to every positive integer.
pub(crate) trait CodeSource: Sync {
    /// Codes of `a·t + b` for `t = 1..=count` (`None`: argument not usable).
    fn progression(&self, a: u128, b: i128, count: usize) -> Result<Vec<Option<u128>>, AveragesError>;
    fn constant(&self, num: u128, den: u128) -> Result<u128, AveragesError>;
    fn compose(&self, a: u128, b: u128) -> u128;
    fn pow(&self, a: u128, k: i64) -> u128;
    fn identity(&self) -> u128;
    /// Codes are `< radix`, if bounded.
    fn radix(&self) -> Option<u128>;
}

impl CodeSource for Action {
    fn progression(&self, a: u128, b: i128, count: usize) -> Result<Vec<Option<u128>>, AveragesError> {
        Ok(self.codes_on_progression(a, b, count)?)
    }

    fn constant(&self, num: u128, den: u128) -> Result<u128, AveragesError> {
        Ok(self.code_rational(num, den)?)
    }

    fn compose(&self, a: u128, b: u128) -> u128 {
        Action::compose(self, a, b)
    }

    fn pow(&self, a: u128, k: i64) -> u128 {
        Action::pow(self, a, k)
    }

    fn identity(&self) -> u128 {
        self.identity_code().expect("discrete action")
    }

    fn radix(&self) -> Option<u128> {
        self.group_size()
    }
}

/// Codes are the values `a(n)` of a completely additive sequence, as `i128` bits.
pub(crate) struct AdditiveSource<'a>(pub &'a CompletelyAdditiveSequence);

impl CodeSource for AdditiveSource<'_> {
    fn progression(&self, a: u128, b: i128, count: usize) -> Result<Vec<Option<u128>>, AveragesError> {
        let enc = |v: i64| Some(v as i128 as u128);
        let top = crate::numtheory::progression::validate_progression(a, b, count)?;
        if top <= AUTO_TABLE_LIMIT as u128 {
            if let Some(t) = shared_table(top as u64) {
                let parts = par::map_chunks(count, par::DEFAULT_CHUNK, |r| {
                    r.map(|i| {
                        let v = (a * (i as u128 + 1)).wrapping_add_signed(b) as u64;
                        let mut s = 0i64;
                        t.for_each_prime_power(v, |p, e| s += self.0.prime_value(p as u128) * e as i64);
                        enc(s)
                    })
                    .collect::<Vec<_>>()
                });
                return Ok(parts.into_iter().flatten().collect());
            }
        }
        let facs = progression_factorize(a, b, count, None)?;
        Ok(facs.iter().map(|f| enc(self.0.eval_factors(f.factors()))).collect())
    }

    fn constant(&self, num: u128, den: u128) -> Result<u128, AveragesError> {
        let a = self.0.eval(num)?;
        let b = self.0.eval(den)?;
        Ok((a - b) as i128 as u128)
    }

    fn compose(&self, a: u128, b: u128) -> u128 {
        a.wrapping_add(b)
    }

    fn pow(&self, a: u128, k: i64) -> u128 {
        (a as i128).wrapping_mul(k as i128) as u128
    }

    fn identity(&self) -> u128 {
        0
    }

    fn radix(&self) -> Option<u128> {
        None
    }
}

/// Codes of `L(grid(m, n))^k` for `m, n ∈ [1, N]`, indexed by `t = u·m + v·n`.
struct FormTable {
    u: i64,
    v: i64,
    start: i64,
    codes: Vec<Option<u128>>,
}

impl FormTable {
    fn build(
        source: &dyn CodeSource,
        form: &LinearForm,
        k: i64,
        grid: &Grid2D,
        n: usize,
    ) -> Result<Self, AveragesError> {
        let (cm, cn, c0) = grid.pull_back(form);
        let g = cm.gcd(&cn);
        let (u, v) = ((cm / g) as i64, (cn / g) as i64);
        let nn = n as i64;
        let lo = |c: i64| if c >= 0 { c } else { c * nn };
        let hi = |c: i64| if c >= 0 { c * nn } else { c };
        let (tmin, tmax) = (lo(u) + lo(v), hi(u) + hi(v));
        // First t with g·t + c0 ≥ 1.
        let t0 = Integer::div_ceil(&(1 - c0), &g) as i64;
        let start = tmin.max(t0);
        let mut codes = Vec::new();
        if start <= tmax {
            let count = (tmax - start + 1) as usize;
            let b = c0 + g * (start as i128 - 1);
            codes = source.progression(g as u128, b, count)?;
            if k != 1 {
                for c in codes.iter_mut().flatten() {
                    *c = source.pow(*c, k);
                }
            }
        }
        Ok(Self { u, v, start, codes })
    }

    #[inline]
    fn get(&self, m: i64, n: i64) -> Option<u128> {
        let t = self.u * m + self.v * n;
        if t < self.start {
            return None;
        }
        self.codes.get((t - self.start) as usize).copied().flatten()
    }
}

struct CompiledIterate<'a> {
    source: &'a dyn CodeSource,
    constant: u128,
    factors: Vec<FormTable>,
}

impl CompiledIterate<'_> {
    #[inline]
    fn code(&self, m: i64, n: i64) -> Option<u128> {
        let mut c = self.constant;
        for f in &self.factors {
            c = self.source.compose(c, f.get(m, n)?);
        }
        Some(c)
    }
}

/// One iterate of a grid average.
pub(crate) struct IterateSpec<'a> {
    pub source: &'a dyn CodeSource,
    pub r: RationalPolynomialFL,
}

/// Exact counts of code tuples over the scanned grid.
#[derive(Clone, Debug, Default)]
pub(crate) struct Histogram {
    pub entries: Vec<(Vec<u128>, u64)>,
    pub contributing: u64,
    pub excluded: u64,
}

enum Counter {
    Dense(Vec<u64>),
    Sparse(HashMap<u128, u64>),
    Wide(HashMap<Vec<u128>, u64>),
}

pub(crate) type PointFilter<'a> = Option<&'a (dyn Fn(i64, i64) -> bool + Sync)>;

/// Scans `m, n ∈ [1, N]` in row-major order.
pub(crate) fn grid_histogram(
    iterates: &[IterateSpec<'_>],
    grid: &Grid2D,
    n: usize,
    filter: PointFilter<'_>,
) -> Result<Histogram, AveragesError> {
    if grid.a1 == 0 || grid.a2 == 0 {
        return Err(AveragesError::InvalidArgument("grid steps must be positive".into()));
    }
    if iterates.len() > MAX_ITERATES {
        return Err(AveragesError::InvalidArgument(format!(
            "at most {MAX_ITERATES} iterates"
        )));
    }
    let compiled = iterates
        .iter()
        .map(|it| {
            let c = it.r.constant();
            let num = c
                .numer()
                .to_u128()
                .ok_or_else(|| AveragesError::InvalidArgument("constant too large".into()))?;
            let den = c
                .denom()
                .to_u128()
                .ok_or_else(|| AveragesError::InvalidArgument("constant too large".into()))?;
            let constant = if num == den {
                it.source.identity()
            } else {
                it.source.constant(num, den)?
            };
            let factors =
                it.r.factors()
                    .iter()
                    .map(|(f, k)| FormTable::build(it.source, f, *k as i64, grid, n))
                    .collect::<Result<Vec<_>, _>>()?;
            Ok(CompiledIterate {
                source: it.source,
                constant,
                factors,
            })
        })
        .collect::<Result<Vec<_>, AveragesError>>()?;

    let radices: Option<Vec<u128>> = compiled.iter().map(|c| c.source.radix()).collect();
    let combined: Option<u128> = radices
        .as_ref()
        .and_then(|r| r.iter().try_fold(1u128, |acc, &x| acc.checked_mul(x)));
    let l = compiled.len();

    let parts = par::map_chunks(n, ROWS_PER_CHUNK, |rows| {
        let mut counter = match combined {
            Some(c) if c <= DENSE_LIMIT => Counter::Dense(vec![0; c as usize]),
            Some(_) => Counter::Sparse(HashMap::new()),
            None => Counter::Wide(HashMap::new()),
        };
        let mut contributing = 0u64;
        let mut buf = [0u128; MAX_ITERATES];
        for mi in rows {
            let m = mi as i64 + 1;
            'point: for n in 1..=n as i64 {
                if let Some(f) = filter {
                    if !f(m, n) {
                        continue;
                    }
                }
                for (j, it) in compiled.iter().enumerate() {
                    match it.code(m, n) {
                        Some(c) => buf[j] = c,
                        None => continue 'point,
                    }
                }
                contributing += 1;
                match &mut counter {
                    Counter::Dense(v) => v[pack(&buf[..l], radices.as_deref().unwrap()) as usize] += 1,
                    Counter::Sparse(h) => *h.entry(pack(&buf[..l], radices.as_deref().unwrap())).or_default() += 1,
                    Counter::Wide(h) => *h.entry(buf[..l].to_vec()).or_default() += 1,
                }
            }
        }
        (counter, contributing)
    });

    let mut merged: BTreeMap<Vec<u128>, u64> = BTreeMap::new();
    let mut contributing = 0;
    for (counter, c) in parts {
        contributing += c;
        match counter {
            Counter::Dense(v) => {
                for (key, cnt) in v.into_iter().enumerate().filter(|(_, c)| *c > 0) {
                    *merged
                        .entry(unpack(key as u128, radices.as_deref().unwrap()))
                        .or_default() += cnt;
                }
            }
            Counter::Sparse(h) => {
                for (key, cnt) in h {
                    *merged.entry(unpack(key, radices.as_deref().unwrap())).or_default() += cnt;
                }
            }
            Counter::Wide(h) => {
                for (key, cnt) in h {
                    *merged.entry(key).or_default() += cnt;
                }
            }
        }
    }
    let total = (n as u64) * (n as u64);
    Ok(Histogram {
        entries: merged.into_iter().collect(),
        contributing,
        excluded: total - contributing,
    })
}

fn pack(codes: &[u128], radices: &[u128]) -> u128 {
    let mut key = 0u128;
    for (c, r) in codes.iter().zip(radices).rev() {
        key = key * r + c;
    }
    key
}

fn unpack(mut key: u128, radices: &[u128]) -> Vec<u128> {
    radices
        .iter()
        .map(|r| {
            let c = key % r;
            key /= r;
            c
        })
        .collect()
}

/// Histogram of the codes of `a·t + b`, `t ∈ [1, N]`, over the `t` accepted by `keep`.
pub(crate) fn progression_histogram(
    source: &dyn CodeSource,
    a: u128,
    b: i128,
    n: usize,
    keep: Option<&(dyn Fn(usize) -> bool + Sync)>,
) -> Result<Histogram, AveragesError> {
    let codes = source.progression(a, b, n)?;
    let mut counts: BTreeMap<u128, u64> = BTreeMap::new();
    let mut contributing = 0u64;
    for (i, c) in codes.iter().enumerate() {
        if keep.is_some_and(|k| !k(i + 1)) {
            continue;
        }
        if let Some(c) = c {
            *counts.entry(*c).or_default() += 1;
            contributing += 1;
        }
    }
    Ok(Histogram {
        entries: counts.into_iter().map(|(k, v)| (vec![k], v)).collect(),
        contributing,
        excluded: n as u64 - contributing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::rotation_by;
    use crate::multfn::MultiplicativeFunctionSpec as S;

    #[test]
    fn histogram_matches_direct_scan() {
        let act = Action::Fg(rotation_by(&S::Liouville.compile().unwrap()).unwrap());
        let rs = [
            RationalPolynomialFL::parse("(m)").unwrap(),
            RationalPolynomialFL::parse("(m + 2n)").unwrap(),
            RationalPolynomialFL::parse("(m - n) * (n)^-1").unwrap(),
        ];
        let its: Vec<IterateSpec> = rs
            .iter()
            .map(|r| IterateSpec {
                source: &act,
                r: r.clone(),
            })
            .collect();
        let grid = Grid2D {
            a1: 6,
            b1: 1,
            a2: 6,
            b2: 0,
        };
        let n = 40;
        let h = grid_histogram(&its, &grid, n, None).unwrap();
        let mut direct: BTreeMap<Vec<u128>, u64> = BTreeMap::new();
        for m in 1..=n as i64 {
            for k in 1..=n as i64 {
                let (x, y) = grid.point(m, k);
                if x - y <= 0 {
                    continue;
                }
                let key = vec![
                    act.code(x as u128).unwrap(),
                    act.code((x + 2 * y) as u128).unwrap(),
                    act.code_rational((x - y) as u128, y as u128).unwrap(),
                ];
                *direct.entry(key).or_default() += 1;
            }
        }
        assert_eq!(h.entries, direct.into_iter().collect::<Vec<_>>());
        assert_eq!(h.contributing + h.excluded, (n * n) as u64);
    }

    #[test]
    fn filter_counts() {
        let act = Action::Fg(crate::actions::FgAction::trivial(1));
        let its = [IterateSpec {
            source: &act,
            r: RationalPolynomialFL::one(),
        }];
        let f = |m: i64, n: i64| m > n;
        let h = grid_histogram(&its, &Grid2D::full(), 50, Some(&f)).unwrap();
        assert_eq!(h.excluded, 50 * 51 / 2);
    }
}
