use serde::{Deserialize, Serialize};

use multact_core::actions::{Action, ActionDesc, DilationAction, Observable, ObservableDesc};
use multact_core::averages::{multilinear_average, rational_average, recurrence_profile, sample_q, QTrick};
use multact_core::linforms::Grid2D;

use super::{forms, liouville_rotation, rational_polys, strings};
use crate::error::{fail, LabError};
use crate::registry::{Ctx, Experiment};
use crate::report::{cplx, int, num, Report, Table};

/// One action per iterate, or a single action shared by all of them.
fn broadcast<T: Clone>(v: &[T], len: usize, what: &str) -> Result<Vec<T>, LabError> {
    match v.len() {
        1 => Ok(vec![v[0].clone(); len]),
        l if l == len => Ok(v.to_vec()),
        l => Err(LabError::Schema(format!("{l} {what} for {len} iterates"))),
    }
}

fn build_all(
    actions: &[ActionDesc],
    observables: &[ObservableDesc],
    len: usize,
) -> Result<(Vec<Action>, Vec<Observable>), LabError> {
    let acts = broadcast(actions, len, "actions")?
        .iter()
        .map(|a| a.build())
        .collect::<Result<Vec<_>, _>>()?;
    let obs = broadcast(observables, len, "observables")?
        .iter()
        .zip(&acts)
        .map(|(o, a)| o.build(a))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((acts, obs))
}

fn value_rows(t: &mut Table, n: usize, v: &Observable) {
    for (x, z) in v.as_vector().unwrap_or(&[]).iter().enumerate() {
        let [re, im] = cplx(*z);
        t.push(vec![int(n), int(x), re, im]);
    }
}

pub struct MainALinear;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MainAParams {
    pub actions: Vec<ActionDesc>,
    pub observables: Vec<ObservableDesc>,
    pub forms: Vec<String>,
    pub grid: Grid2D,
    pub n: usize,
    /// Bound for `|∫ value − ∏ ∫ F_j|`.
    pub tolerance: f64,
}

impl Default for MainAParams {
    fn default() -> Self {
        Self {
            actions: vec![liouville_rotation()],
            observables: vec![ObservableDesc::Identity],
            forms: strings(&["m", "n", "m + n", "m + 2n"]),
            grid: Grid2D::full(),
            n: 3000,
            tolerance: 0.05,
        }
    }
}

impl Experiment for MainALinear {
    type Params = MainAParams;
    const NAME: &'static str = "mainA-linear";
    const ABOUT: &'static str = "multilinear average of T_{L_j(m,n)} F_j over pairwise independent linear forms";

    fn run(p: &MainAParams, _: &Ctx) -> Result<Report, LabError> {
        let fs = forms(&p.forms)?;
        let (acts, obs) = build_all(&p.actions, &p.observables, fs.len())?;
        let ar: Vec<&Action> = acts.iter().collect();
        let or: Vec<&Observable> = obs.iter().collect();
        let avg = multilinear_average(&ar, &or, &fs, &p.grid, p.n)?;
        let mut t = Table::new(&["n", "x", "re", "im"]);
        value_rows(&mut t, p.n, &avg.value);
        let prod = obs.iter().map(|o| o.integral()).product::<num_complex::Complex64>();
        let gap = (avg.integral() - prod).norm();
        let mut r = Report::new(t);
        r.count("multilinear_average", avg.contributing, avg.excluded);
        r.metric("integral_abs", avg.integral().norm());
        r.notes.extend(avg.warnings);
        r.metric("product_of_integrals_abs", prod.norm());
        r.metric("gap", gap);
        r.check("integral-matches-product", gap <= p.tolerance);
        Ok(r)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairFilter {
    None,
    #[default]
    MGreaterThanN,
}

pub struct MainBRational;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MainBParams {
    pub actions: Vec<ActionDesc>,
    pub observables: Vec<ObservableDesc>,
    pub rational_polynomials: Vec<String>,
    pub filter: PairFilter,
    pub grid: Grid2D,
    pub n_values: Vec<usize>,
    /// Bound for `‖A_N − A_N'‖_{L²}` between the last two rungs.
    pub tolerance: f64,
}

impl Default for MainBParams {
    fn default() -> Self {
        Self {
            actions: vec![liouville_rotation()],
            observables: vec![ObservableDesc::Identity],
            rational_polynomials: strings(&["(m) * (n)^-1", "(m - n) * (m + n) * (m)^-1 * (n)^-1"]),
            filter: PairFilter::MGreaterThanN,
            grid: Grid2D::full(),
            n_values: vec![1000, 2000],
            tolerance: 0.05,
        }
    }
}

impl Experiment for MainBRational {
    type Params = MainBParams;
    const NAME: &'static str = "mainB-rational";
    const ABOUT: &'static str = "averages of T_{R_j(m,n)} F_j for rational polynomials, Cauchy gaps across N";

    fn run(p: &MainBParams, _: &Ctx) -> Result<Report, LabError> {
        let rs = rational_polys(&p.rational_polynomials)?;
        let (acts, obs) = build_all(&p.actions, &p.observables, rs.len())?;
        let ar: Vec<&Action> = acts.iter().collect();
        let or: Vec<&Observable> = obs.iter().collect();
        let keep = |m: i64, n: i64| m > n;
        let filter: Option<&(dyn Fn(i64, i64) -> bool + Sync)> = match p.filter {
            PairFilter::None => None,
            PairFilter::MGreaterThanN => Some(&keep),
        };
        let mut t = Table::new(&["n", "x", "re", "im"]);
        let mut r = Report::default();
        let mut prev: Option<Observable> = None;
        let mut last_gap = None;
        for &n in &p.n_values {
            let avg = rational_average(&ar, &or, &rs, &p.grid, n, filter)?;
            r.count(format!("rational_average n={n}"), avg.contributing, avg.excluded);
            value_rows(&mut t, n, &avg.value);
            if let Some(pv) = &prev {
                let g = avg.value.distance(pv)?;
                r.metric(&format!("gap_n{n}"), g);
                last_gap = Some(g);
            }
            prev = Some(avg.value);
        }
        r.table = t;
        if let Some(g) = last_gap {
            r.check("cauchy-gap", g <= p.tolerance);
        }
        Ok(r)
    }
}

pub struct RecurrenceProfileExp;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecurrenceParams {
    pub action: ActionDesc,
    pub set: ObservableDesc,
    pub rational_polynomials: Vec<String>,
    /// Used when `q_trick` is absent.
    pub grid: Grid2D,
    /// Replaces `grid` by `(Qm + offset_m, Qn + offset_n)` for sampled `Q ∈ Φ_k`.
    pub q_trick: Option<QTrick>,
    pub n: usize,
    pub epsilon: f64,
    pub min_density: f64,
}

impl Default for RecurrenceParams {
    fn default() -> Self {
        Self {
            action: liouville_rotation(),
            set: ObservableDesc::Set { points: vec![0] },
            rational_polynomials: strings(&["(n) * (m)^-1", "(m + n) * (m)^-1", "(m + 2n) * (m)^-1"]),
            grid: Grid2D::full(),
            q_trick: Some(QTrick {
                k: 3,
                samples: 2,
                offset_m: 1,
                offset_n: 0,
            }),
            n: 2000,
            epsilon: 0.05,
            min_density: 0.1,
        }
    }
}

impl Experiment for RecurrenceProfileExp {
    type Params = RecurrenceParams;
    const NAME: &'static str = "recurrence-profile";
    const ABOUT: &'static str = "distribution of μ(A ∩ T^{-1}_{R_1}A ∩ …) over a grid, optionally with the Q-trick";

    fn run(p: &RecurrenceParams, ctx: &Ctx) -> Result<Report, LabError> {
        let rs = rational_polys(&p.rational_polynomials)?;
        let act = p.action.build()?;
        let a = p.set.build(&act)?;
        let acts = vec![&act; rs.len()];
        let grids: Vec<(String, Grid2D)> = match &p.q_trick {
            None => vec![("".into(), p.grid)],
            Some(q) => sample_q(q.k, q.samples, ctx.seed)?
                .into_iter()
                .map(|big_q| {
                    let step = u64::try_from(big_q).map_err(|_| fail("Q too large"))?;
                    Ok((
                        big_q.to_string(),
                        Grid2D {
                            a1: step,
                            b1: q.offset_m,
                            a2: step,
                            b2: q.offset_n,
                        },
                    ))
                })
                .collect::<Result<_, LabError>>()?,
        };
        let mut t = Table::new(&[
            "q",
            "n",
            "contributing",
            "excluded",
            "benchmark",
            "good",
            "good_density",
            "mean_measure",
            "min_measure",
            "max_measure",
        ]);
        let mut r = Report::default();
        let mut min_density = f64::INFINITY;
        for (label, grid) in &grids {
            let prof = recurrence_profile(&acts, &a, &rs, grid, p.n, p.epsilon, None)?;
            r.count(
                format!("recurrence_profile q={label}"),
                prof.contributing,
                prof.excluded,
            );
            min_density = min_density.min(prof.good_density);
            t.push(vec![
                label.clone(),
                int(p.n),
                int(prof.contributing),
                int(prof.excluded),
                num(prof.benchmark),
                int(prof.good),
                num(prof.good_density),
                num(prof.mean_measure),
                num(prof.min_measure),
                num(prof.max_measure),
            ]);
        }
        r.table = t;
        r.metric("min_good_density", min_density);
        r.check("density-lower-bound", min_density >= p.min_density);
        Ok(r)
    }
}

pub struct CounterexampleDilation;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DilationParams {
    pub modulus: u64,
    pub power: u32,
    /// `A = [lo, hi)`; both default to the middle third of the circle.
    pub lo: Option<u64>,
    pub hi: Option<u64>,
    pub rational_polynomials: Vec<String>,
    pub n_values: Vec<usize>,
    pub max_measure: f64,
}

impl Default for DilationParams {
    fn default() -> Self {
        Self {
            modulus: 10_007,
            power: 1,
            lo: None,
            hi: None,
            rational_polynomials: strings(&["(n) * (m)^-1", "(m + n) * (m)^-1"]),
            n_values: vec![25, 50, 100],
            max_measure: 0.01,
        }
    }
}

impl Experiment for CounterexampleDilation {
    type Params = DilationParams;
    const NAME: &'static str = "counterexample-dilation";
    const ABOUT: &'static str = "max_{m,n ≤ N} μ(T_m^{-1}A ∩ T_n^{-1}A ∩ T_{m+n}^{-1}A) for dilations of the circle";

    fn run(p: &DilationParams, _: &Ctx) -> Result<Report, LabError> {
        let rs = rational_polys(&p.rational_polynomials)?;
        let act = Action::Dilation(DilationAction::new(p.modulus, p.power)?);
        let size = act.size().ok_or_else(|| fail("dilation space has no size"))? as u64;
        let lo = p.lo.unwrap_or(size.div_ceil(3));
        let hi = p.hi.unwrap_or((2 * size).div_ceil(3));
        if lo >= hi || hi > size {
            return Err(fail(format!("empty or oversized interval [{lo}, {hi}) in Z_{size}")));
        }
        let a = Observable::indicator(size as usize, |x| (lo..hi).contains(&(x as u64)));
        let acts = vec![&act; rs.len()];
        let mut t = Table::new(&[
            "n",
            "contributing",
            "excluded",
            "max_measure",
            "mean_measure",
            "min_measure",
        ]);
        let mut r = Report::default();
        let mut worst = 0.0f64;
        for &n in &p.n_values {
            let prof = recurrence_profile(&acts, &a, &rs, &Grid2D::full(), n, 0.0, None)?;
            r.count(format!("recurrence_profile n={n}"), prof.contributing, prof.excluded);
            worst = worst.max(prof.max_measure);
            t.push(vec![
                int(n),
                int(prof.contributing),
                int(prof.excluded),
                num(prof.max_measure),
                num(prof.mean_measure),
                num(prof.min_measure),
            ]);
        }
        r.table = t;
        r.notes.push(format!("A = [{lo}, {hi}) in Z_{size}"));
        r.metric("max_measure", worst);
        r.metric("measure_a", (hi - lo) as f64 / size as f64);
        r.check("intersection-small", worst <= p.max_measure);
        Ok(r)
    }
}
