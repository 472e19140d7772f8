use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use multact_core::actions::{ActionDesc, Observable, ObservableDesc};
use multact_core::averages::{concentration_statistic, pretentious_projection, single_average, Reference};
use multact_core::folner::{phi_k, SdeltaSpec};
use multact_core::multfn::MultiplicativeFunctionSpec as S;

use super::chi3_rotation;
use crate::error::{fail, LabError};
use crate::registry::{Ctx, Experiment};
use crate::report::{int, num, Report, Table};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReferenceKind {
    #[default]
    Base,
    RunningAverage,
}

impl ReferenceKind {
    fn build(self) -> Reference {
        match self {
            ReferenceKind::Base => Reference::Base,
            ReferenceKind::RunningAverage => Reference::RunningAverage,
        }
    }
}

pub struct ConcentrationFg;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConcentrationFgParams {
    pub action: ActionDesc,
    pub observable: ObservableDesc,
    /// `Q` ranges over `Φ_k`.
    pub k: u32,
    pub b: i64,
    pub n_values: Vec<usize>,
    pub reference: ReferenceKind,
    pub tolerance: f64,
}

impl Default for ConcentrationFgParams {
    fn default() -> Self {
        Self {
            action: chi3_rotation(),
            observable: ObservableDesc::Identity,
            k: 3,
            b: 1,
            n_values: vec![1000, 10_000, 100_000],
            reference: ReferenceKind::Base,
            tolerance: 1e-12,
        }
    }
}

impl Experiment for ConcentrationFg {
    type Params = ConcentrationFgParams;
    const NAME: &'static str = "concentration-fg";
    const ABOUT: &'static str = "concentration statistic on Qn + b for Q ∈ Φ_K, finitely generated actions";

    fn run(p: &ConcentrationFgParams, _: &Ctx) -> Result<Report, LabError> {
        let act = p.action.build()?;
        let f = p.observable.build(&act)?;
        let reference = p.reference.build();
        let mut t = Table::new(&["q", "n", "value", "contributing", "excluded"]);
        let mut r = Report::default();
        let mut worst = 0.0f64;
        for e in phi_k(p.k)? {
            let q = e
                .to_u128()
                .ok_or_else(|| fail(format!("Q = {} does not fit", e.value)))?;
            for &n in &p.n_values {
                let c = concentration_statistic(&act, &f, q, p.b as i128, n, &reference, None)?;
                worst = worst.max(c.value);
                r.count(format!("concentration q={q} n={n}"), c.contributing, c.excluded);
                t.push(vec![int(q), int(n), num(c.value), int(c.contributing), int(c.excluded)]);
            }
        }
        r.table = t;
        r.metric("max_value", worst);
        r.check("within-tolerance", worst <= p.tolerance);
        Ok(r)
    }
}

pub struct ConcentrationGeneralRestricted;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConcentrationGeneralParams {
    pub action: ActionDesc,
    pub observable: ObservableDesc,
    pub q: u64,
    pub b: i64,
    pub n_values: Vec<usize>,
    /// Restrictions to `S_δ`, one row each next to the unrestricted row.
    pub deltas: Vec<f64>,
    pub reference: ReferenceKind,
    /// Bound for the statistic under the smallest `δ` at the largest `N`.
    pub restricted_max: f64,
}

impl Default for ConcentrationGeneralParams {
    fn default() -> Self {
        Self {
            action: ActionDesc::FourierRotation {
                function: S::Archimedean { t: 1.0 },
            },
            observable: ObservableDesc::Identity,
            q: 720,
            b: 1,
            n_values: vec![10_000, 100_000],
            deltas: vec![0.2, 0.1, 0.05],
            reference: ReferenceKind::RunningAverage,
            restricted_max: 0.1,
        }
    }
}

impl Experiment for ConcentrationGeneralRestricted {
    type Params = ConcentrationGeneralParams;
    const NAME: &'static str = "concentration-general-restricted";
    const ABOUT: &'static str = "concentration statistic with and without restriction to S_δ";

    fn run(p: &ConcentrationGeneralParams, _: &Ctx) -> Result<Report, LabError> {
        if p.n_values.is_empty() {
            return Err(fail("n_values is empty"));
        }
        let act = p.action.build()?;
        let f = p.observable.build(&act)?;
        let reference = p.reference.build();
        let specs = p
            .deltas
            .iter()
            .map(|&d| SdeltaSpec::new(d))
            .collect::<Result<Vec<_>, _>>()?;
        let smallest = p
            .deltas
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i);
        let mut t = Table::new(&["n", "delta", "value", "contributing", "excluded"]);
        let mut r = Report::default();
        let mut last_restricted = None;
        for &n in &p.n_values {
            let un = concentration_statistic(&act, &f, p.q as u128, p.b as i128, n, &reference, None)?;
            r.count(format!("unrestricted n={n}"), un.contributing, un.excluded);
            t.push(vec![
                int(n),
                "none".into(),
                num(un.value),
                int(un.contributing),
                int(un.excluded),
            ]);
            r.metric(&format!("unrestricted_n{n}"), un.value);
            for (i, (d, s)) in p.deltas.iter().zip(&specs).enumerate() {
                let re = concentration_statistic(&act, &f, p.q as u128, p.b as i128, n, &reference, Some(s))?;
                r.count(format!("delta={d} n={n}"), re.contributing, re.excluded);
                t.push(vec![
                    int(n),
                    num(*d),
                    num(re.value),
                    int(re.contributing),
                    int(re.excluded),
                ]);
                if Some(i) == smallest {
                    last_restricted = Some(re.value);
                }
            }
        }
        r.table = t;
        if let Some(v) = last_restricted {
            r.metric("restricted_smallest_delta", v);
            r.check("restricted-small", v <= p.restricted_max);
        }
        Ok(r)
    }
}

fn coefficient(obs: &Observable, k: i64) -> Complex64 {
    match obs {
        Observable::Fourier(c) => c.get(&k).copied().unwrap_or_default(),
        Observable::Vector(_) => obs.integral(),
    }
}

pub struct CounterexampleArchimedean;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ArchimedeanParams {
    pub t: f64,
    /// Progression `an + b` for the plain averages.
    pub a: u64,
    pub b: i64,
    pub n_values: Vec<usize>,
    /// Smallest spread `max |A_N − A_N'|` that counts as non-convergence.
    pub min_spread: f64,
    pub q: u64,
    pub concentration_n: Vec<usize>,
    pub delta: f64,
    pub unrestricted_min: f64,
    pub restricted_max: f64,
}

impl Default for ArchimedeanParams {
    fn default() -> Self {
        Self {
            t: 1.0,
            a: 1,
            b: 0,
            n_values: vec![1000, 10_000, 100_000, 1_000_000],
            min_spread: 0.5,
            q: 720,
            concentration_n: vec![10_000, 100_000],
            delta: 0.05,
            unrestricted_min: 0.3,
            restricted_max: 0.1,
        }
    }
}

impl Experiment for CounterexampleArchimedean {
    type Params = ArchimedeanParams;
    const NAME: &'static str = "counterexample-archimedean";
    const ABOUT: &'static str = "Fourier rotation by n^{it}: averages along an + b oscillate, concentration needs S_δ";

    fn run(p: &ArchimedeanParams, _: &Ctx) -> Result<Report, LabError> {
        let act = multact_core::actions::Action::Fourier(multact_core::actions::FourierRotationAction::new(
            &S::Archimedean { t: p.t },
        )?);
        let e1 = Observable::basis(1);
        let sd = SdeltaSpec::new(p.delta)?;
        let mut t = Table::new(&["quantity", "n", "re", "im", "abs"]);
        let mut r = Report::default();
        let mut values = Vec::new();
        for &n in &p.n_values {
            let avg = single_average(&act, &e1, p.a as u128, p.b as i128, n)?;
            r.count(format!("average n={n}"), avg.contributing, avg.excluded);
            let z = coefficient(&avg.value, 1);
            values.push(z);
            t.push(vec![
                "progression-average".into(),
                int(n),
                num(z.re),
                num(z.im),
                num(z.norm()),
            ]);
        }
        let mut spread = 0.0f64;
        for (i, x) in values.iter().enumerate() {
            for y in &values[i + 1..] {
                spread = spread.max((x - y).norm());
            }
        }
        let (mut un_min, mut re_max) = (f64::INFINITY, 0.0f64);
        for &n in &p.concentration_n {
            let un = concentration_statistic(&act, &e1, p.q as u128, 1, n, &Reference::RunningAverage, None)?;
            let re = concentration_statistic(&act, &e1, p.q as u128, 1, n, &Reference::RunningAverage, Some(&sd))?;
            r.count(format!("unrestricted n={n}"), un.contributing, un.excluded);
            r.count(format!("restricted n={n}"), re.contributing, re.excluded);
            un_min = un_min.min(un.value);
            re_max = re_max.max(re.value);
            t.push(vec![
                "concentration-unrestricted".into(),
                int(n),
                num(un.value),
                String::new(),
                num(un.value),
            ]);
            t.push(vec![
                "concentration-restricted".into(),
                int(n),
                num(re.value),
                String::new(),
                num(re.value),
            ]);
        }
        r.table = t;
        r.metric("spread", spread);
        r.check("averages-do-not-converge", spread >= p.min_spread);
        if !p.concentration_n.is_empty() {
            r.metric("unrestricted_min", un_min);
            r.metric("restricted_max", re_max);
            r.check("unrestricted-stays-large", un_min >= p.unrestricted_min);
            r.check("restricted-small", re_max <= p.restricted_max);
        }
        Ok(r)
    }
}

pub struct Decompose;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecomposeParams {
    pub action: ActionDesc,
    pub observable: ObservableDesc,
    pub k: u32,
    pub q_samples: usize,
    pub n: usize,
    pub diagnostic_grid: Vec<(u64, i64)>,
    pub diagnostic_n: usize,
    pub mean_tolerance: f64,
}

impl Default for DecomposeParams {
    fn default() -> Self {
        Self {
            action: chi3_rotation(),
            observable: ObservableDesc::Identity,
            k: 3,
            q_samples: 3,
            n: 100_000,
            diagnostic_grid: vec![(1, 0), (2, 1), (3, 1), (3, 2), (5, 1)],
            diagnostic_n: 10_000,
            mean_tolerance: 1e-12,
        }
    }
}

impl Experiment for Decompose {
    type Params = DecomposeParams;
    const NAME: &'static str = "decompose";
    const ABOUT: &'static str = "pretentious / aperiodic splitting F = F_p + F_a by averaging over Φ_K";

    fn run(p: &DecomposeParams, ctx: &Ctx) -> Result<Report, LabError> {
        let act = p.action.build()?;
        let f = p.observable.build(&act)?;
        let grid: Vec<(u128, i128)> = p.diagnostic_grid.iter().map(|&(q, r)| (q as u128, r as i128)).collect();
        let proj = pretentious_projection(&act, &f, p.k, p.q_samples, ctx.seed, p.n, &grid, p.diagnostic_n)?;
        let (fv, pv, av) = (
            f.as_vector().unwrap(),
            proj.f_p.as_vector().unwrap(),
            proj.f_a.as_vector().unwrap(),
        );
        let mut t = Table::new(&["x", "f_re", "f_im", "fp_re", "fp_im", "fa_re", "fa_im"]);
        for x in 0..fv.len() {
            t.push(vec![
                int(x),
                num(fv[x].re),
                num(fv[x].im),
                num(pv[x].re),
                num(pv[x].im),
                num(av[x].re),
                num(av[x].im),
            ]);
        }
        let gap = (proj.f_p.integral() + proj.f_a.integral() - f.integral()).norm();
        let mut r = Report::new(t);
        r.metric("norm_fp", proj.f_p.l2_norm());
        r.metric("norm_fa", proj.f_a.l2_norm());
        r.metric("max_aperiodicity", proj.max_aperiodicity);
        r.metric("mean_gap", gap);
        r.notes.push(format!("Q samples: {:?}", proj.qs));
        for (q, b, v) in &proj.aperiodicity {
            r.notes.push(format!("‖E T_{{{q}n+{b}}} F_a‖ = {}", num(*v)));
        }
        r.check("mean-preserved", gap <= p.mean_tolerance);
        Ok(r)
    }
}
