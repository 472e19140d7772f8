use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use multact_core::actions::{conditional_expectation, Observable, Partition};
use multact_core::equations::{
    monochromatic_search, shifted_family, solution_family, to_recurrence_forms, QuadEquation, SearchBounds,
    TripleFilter,
};
use multact_core::linforms::lattice_indicator_check;
use multact_core::numtheory::FactorTable;

use crate::error::{fail, LabError};
use crate::registry::{Ctx, Experiment};
use crate::report::{int, num, Report, Table};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Coloring {
    /// `Ω(n) mod 2`.
    LiouvilleParity,
    /// `Ω(n) mod modulus`.
    OmegaMod { modulus: u32 },
    /// `n mod modulus`.
    Residue { modulus: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpec {
    pub bounds: SearchBounds,
    #[serde(default)]
    pub filter: TripleFilter,
    pub coloring: Coloring,
}

pub struct QuadEquationExp;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadParams {
    pub equation: QuadEquation,
    /// Shift `m ↦ m + l·n` for the nonnegative family and the recurrence forms.
    pub shift: i64,
    pub search: Option<SearchSpec>,
}

impl Default for QuadParams {
    fn default() -> Self {
        Self {
            equation: QuadEquation {
                a: 2,
                b: 1,
                d: 3,
                e: 1,
                f: 1,
            },
            shift: 1,
            search: Some(SearchSpec {
                bounds: SearchBounds {
                    limit: 10_000,
                    k_max: 20,
                    m_max: 40,
                    n_max: 40,
                },
                filter: TripleFilter::Distinct,
                coloring: Coloring::LiouvilleParity,
            }),
        }
    }
}

impl Experiment for QuadEquationExp {
    type Params = QuadParams;
    const NAME: &'static str = "quad-equation";
    const ABOUT: &'static str = "parametrized solutions of ax² + by² = dxy + exz + fyz and a monochromatic search";

    fn run(p: &QuadParams, _: &Ctx) -> Result<Report, LabError> {
        let eq = p.equation;
        let fam = solution_family(&eq)?;
        let shifted = shifted_family(&eq, p.shift)?;
        let forms = to_recurrence_forms(&eq, p.shift)?;
        let mut t = Table::new(&["k", "m", "n", "x", "y", "z", "color"]);
        let mut found = 0usize;
        if let Some(s) = &p.search {
            let table = FactorTable::build(s.bounds.limit.max(2))?;
            let color = |v: u64| -> u32 {
                match s.coloring {
                    Coloring::LiouvilleParity => table.omega(v) % 2,
                    Coloring::OmegaMod { modulus } => table.omega(v) % modulus.max(1),
                    Coloring::Residue { modulus } => (v % modulus.max(1)) as u32,
                }
            };
            let hits = monochromatic_search(&shifted, color, &s.bounds, s.filter);
            found = hits.len();
            for h in hits {
                t.push(vec![
                    int(h.k),
                    int(h.m),
                    int(h.n),
                    int(h.x),
                    int(h.y),
                    int(h.z),
                    int(h.color),
                ]);
            }
        }
        let mut r = Report::new(t);
        r.notes.push(format!("equation: {eq}"));
        r.notes
            .push(format!("family: x = {}, y = {}, z = {}", fam.x, fam.y, fam.z));
        r.notes.push(format!(
            "shifted family: x = {}, y = {}, z = {}",
            shifted.x, shifted.y, shifted.z
        ));
        r.notes.push(format!(
            "recurrence forms: L1 = {}, L2 = {}, L3 = {}, L4 = {}",
            forms.l1, forms.l2, forms.l3, forms.l4
        ));
        r.metric("triples_found", found as f64);
        r.check("family-is-symbolic-zero", fam.substituted(&eq) == [0; 5]);
        r.check("shifted-family-is-symbolic-zero", shifted.substituted(&eq) == [0; 5]);
        r.check("shifted-family-nonnegative", shifted.is_nonnegative());
        r.check("recurrence-forms-admissible", forms.all_hold());
        if p.search.is_some() {
            let ok = r.table.rows.iter().all(|row| {
                let v: Vec<i128> = row[3..6].iter().map(|s| s.parse().unwrap()).collect();
                eq.holds(v[0], v[1], v[2])
            });
            r.check("triples-solve-equation", ok);
        }
        Ok(r)
    }
}

pub struct ChuInequality;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChuParams {
    pub instances: usize,
    pub size_max: usize,
    pub value_max: f64,
    pub tolerance: f64,
}

impl Default for ChuParams {
    fn default() -> Self {
        Self {
            instances: 100,
            size_max: 40,
            value_max: 3.0,
            tolerance: 1e-12,
        }
    }
}

impl Experiment for ChuInequality {
    type Params = ChuParams;
    const NAME: &'static str = "chu-inequality";
    const ABOUT: &'static str = "∫ F·E(F|P₁)·E(F|P₂) ≥ (∫F)³ for random nonnegative F and partitions";

    fn run(p: &ChuParams, ctx: &Ctx) -> Result<Report, LabError> {
        if p.size_max == 0 || p.value_max.is_nan() || p.value_max <= 0.0 {
            return Err(fail("size_max and value_max must be positive"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let mut t = Table::new(&["instance", "size", "cells1", "cells2", "lhs", "rhs", "slack"]);
        let mut worst = f64::INFINITY;
        for i in 0..p.instances {
            let size = rng.gen_range(1..=p.size_max);
            let f = Observable::from_real((0..size).map(|_| rng.gen::<f64>() * p.value_max));
            let c1 = rng.gen_range(1..=size);
            let c2 = rng.gen_range(1..=size);
            let p1 = Partition::from_labels(&(0..size).map(|_| rng.gen_range(0..c1)).collect::<Vec<_>>());
            let p2 = Partition::from_labels(&(0..size).map(|_| rng.gen_range(0..c2)).collect::<Vec<_>>());
            let e1 = conditional_expectation(&f, &p1)?;
            let e2 = conditional_expectation(&f, &p2)?;
            let lhs = f.mul(&e1)?.mul(&e2)?.integral().re;
            let rhs = f.integral().re.powi(3);
            worst = worst.min(lhs - rhs);
            t.push(vec![
                int(i),
                int(size),
                int(p1.cells()),
                int(p2.cells()),
                num(lhs),
                num(rhs),
                num(lhs - rhs),
            ]);
        }
        let mut r = Report::new(t);
        if p.instances > 0 {
            r.metric("min_slack", worst);
        }
        r.check("inequality-holds", p.instances == 0 || worst >= -p.tolerance);
        Ok(r)
    }
}

pub struct LatticeIdentity;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatticeParams {
    pub instances: usize,
    pub entry_bound: i64,
    pub point_bound: i64,
    pub tolerance: f64,
}

impl Default for LatticeParams {
    fn default() -> Self {
        Self {
            instances: 1000,
            entry_bound: 6,
            point_bound: 50,
            tolerance: 1e-9,
        }
    }
}

/// Whether `(m, n) = A·(u, v)` has an integer solution, by Cramer's rule.
fn in_lattice(a: &[[i64; 2]; 2], m: i64, n: i64) -> bool {
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    (m * a[1][1] - a[0][1] * n) % det == 0 && (a[0][0] * n - a[1][0] * m) % det == 0
}

impl Experiment for LatticeIdentity {
    type Params = LatticeParams;
    const NAME: &'static str = "lattice-identity";
    const ABOUT: &'static str = "lattice indicator 1_{A·Z²} against its exponential-sum expansion over Z_A";

    fn run(p: &LatticeParams, ctx: &Ctx) -> Result<Report, LabError> {
        if p.entry_bound < 1 || p.point_bound < 0 {
            return Err(fail("entry_bound must be ≥ 1 and point_bound ≥ 0"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let mut t = Table::new(&[
            "a11",
            "a12",
            "a21",
            "a22",
            "m",
            "n",
            "indicator",
            "cramer",
            "sum_re",
            "sum_im",
            "z_a_size",
        ]);
        let (mut sums_agree, mut routes_agree) = (true, true);
        let eb = p.entry_bound;
        while t.rows.len() < p.instances {
            let a = [
                [rng.gen_range(-eb..=eb), rng.gen_range(-eb..=eb)],
                [rng.gen_range(-eb..=eb), rng.gen_range(-eb..=eb)],
            ];
            if a[0][0] * a[1][1] - a[0][1] * a[1][0] == 0 {
                continue;
            }
            let (m, n) = (
                rng.gen_range(-p.point_bound..=p.point_bound),
                rng.gen_range(-p.point_bound..=p.point_bound),
            );
            let chk = lattice_indicator_check(&a, m, n)?;
            let cramer = in_lattice(&a, m, n) as u8;
            sums_agree &= chk.agrees(p.tolerance);
            routes_agree &= chk.indicator == cramer;
            t.push(vec![
                int(a[0][0]),
                int(a[0][1]),
                int(a[1][0]),
                int(a[1][1]),
                int(m),
                int(n),
                int(chk.indicator),
                int(cramer),
                num(chk.exponential_sum.re),
                num(chk.exponential_sum.im),
                int(chk.z_a_size),
            ]);
        }
        let mut r = Report::new(t);
        r.check("exponential-sum-matches-indicator", sums_agree);
        r.check("indicator-matches-cramer", routes_agree);
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use multact_core::numtheory::omega;

    #[test]
    fn cramer_membership() {
        let a = [[2, 0], [0, 3]];
        assert!(in_lattice(&a, 4, 9));
        assert!(!in_lattice(&a, 1, 3));
        let b = [[1, 1], [-1, 1]];
        assert!(in_lattice(&b, 2, 0));
        assert!(!in_lattice(&b, 1, 0));
    }

    #[test]
    fn omega_coloring_matches_factorization() {
        let table = FactorTable::build(100).unwrap();
        for v in 1..=100u64 {
            assert_eq!(table.omega(v), omega(v as u128, None).unwrap());
        }
    }
}
