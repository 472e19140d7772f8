//! Ergodic averages of multiplicative actions along progressions, grids,
//! linear forms and rational polynomials.
//!
//! Limits in `N`, `K` and `δ` are never extrapolated: every function computes
//! one finite average and reports how many terms contributed.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

mod grid;

pub use grid::MAX_ITERATES;
use grid::{grid_histogram, progression_histogram, AdditiveSource, CodeSource, Histogram, IterateSpec};

use crate::actions::{Action, ActionError, CompletelyAdditiveSequence, FgAction, Observable, Permutation};
use crate::folner::{phi_k_elements, FolnerError, SdeltaSpec};
use crate::linforms::{independent, Grid2D, LinFormError, LinearForm, RationalPolynomialFL};
use crate::multfn::MultFnError;
use crate::numtheory::NumTheoryError;
use crate::par;
use crate::sum::{ComplexSum, Neumaier};

/// Seed used by experiments that do not specify one.
pub const DEFAULT_SEED: u64 = 0x4d41_4c53;

#[derive(Debug, thiserror::Error)]
pub enum AveragesError {
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    LinForm(#[from] LinFormError),
    #[error(transparent)]
    Folner(#[from] FolnerError),
    #[error(transparent)]
    NumTheory(#[from] NumTheoryError),
    #[error(transparent)]
    MultFn(#[from] MultFnError),
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("every point of the range was excluded")]
    AllExcluded,
    #[error("the set has measure zero")]
    EmptySet,
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
    #[error("{0}")]
    InvalidArgument(String),
}

/// An average together with its bookkeeping.
///
/// `contributing + excluded` is the number of points scanned.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AverageReport {
    pub value: Observable,
    pub n: usize,
    pub contributing: u64,
    pub excluded: u64,
    pub warnings: Vec<String>,
}

impl AverageReport {
    pub fn integral(&self) -> Complex64 {
        self.value.integral()
    }

    pub fn l2_norm(&self) -> f64 {
        self.value.l2_norm()
    }
}

fn check_len(expected: usize, got: usize) -> Result<(), AveragesError> {
    if expected != got {
        return Err(AveragesError::LengthMismatch { expected, got });
    }
    Ok(())
}

fn discrete(action: &Action) -> Result<usize, AveragesError> {
    action
        .size()
        .ok_or(AveragesError::Unsupported("this average needs a finite-space action"))
}

/// `Σ_entries count · ∏_j T_{c_j} F_j / contributing`, computed pointwise.
fn weighted_products(actions: &[&Action], fs: &[&Observable], h: &Histogram) -> Result<Observable, AveragesError> {
    if h.contributing == 0 {
        return Err(AveragesError::AllExcluded);
    }
    let size = discrete(actions[0])?;
    for (a, f) in actions.iter().zip(fs) {
        if a.size() != Some(size) || f.len() != size {
            return Err(ActionError::SpaceMismatch {
                left: size,
                right: f.len(),
            }
            .into());
        }
    }
    let parts = par::map_chunks(h.entries.len(), 16, |range| -> Result<Vec<ComplexSum>, ActionError> {
        let mut acc = vec![ComplexSum::new(); size];
        for (codes, count) in &h.entries[range] {
            let mut prod = vec![Complex64::new(*count as f64, 0.0); size];
            for ((a, f), &c) in actions.iter().zip(fs).zip(codes) {
                let img = a.apply_code(c, f)?;
                for (p, v) in prod.iter_mut().zip(img.as_vector().unwrap()) {
                    *p *= v;
                }
            }
            for (s, p) in acc.iter_mut().zip(prod) {
                s.add(p);
            }
        }
        Ok(acc)
    });
    let mut total = vec![ComplexSum::new(); size];
    for part in parts {
        for (t, p) in total.iter_mut().zip(part?) {
            t.merge(&p);
        }
    }
    let denom = h.contributing as f64;
    Ok(Observable::Vector(total.iter().map(|s| s.value() / denom).collect()))
}

fn report(value: Observable, n: usize, h: &Histogram, warnings: Vec<String>) -> AverageReport {
    AverageReport {
        value,
        n,
        contributing: h.contributing,
        excluded: h.excluded,
        warnings,
    }
}

fn fourier_coefficients(f: &Observable) -> Result<&BTreeMap<i64, Complex64>, AveragesError> {
    match f {
        Observable::Fourier(c) => Ok(c),
        Observable::Vector(_) => Err(ActionError::WrongObservable.into()),
    }
}

/// `E_{n ∈ [N]} T_{an+b} F`.
pub fn single_average(
    action: &Action,
    f: &Observable,
    a: u128,
    b: i128,
    n: usize,
) -> Result<AverageReport, AveragesError> {
    restricted_single_average(action, f, a, b, n, None)
}

/// `E_{n ∈ [N] ∩ S_δ} T_{an+b} F`.
pub fn restricted_single_average(
    action: &Action,
    f: &Observable,
    a: u128,
    b: i128,
    n: usize,
    restriction: Option<&SdeltaSpec>,
) -> Result<AverageReport, AveragesError> {
    let keep = restriction.map(|s| move |i: usize| s.contains(i as u128));
    let keep_ref = keep.as_ref().map(|k| k as &(dyn Fn(usize) -> bool + Sync));
    match action {
        Action::Fourier(rot) => {
            let coeffs = fourier_coefficients(f)?;
            let z = rot.function().progression_values(a, b, n)?;
            let kept: Vec<Complex64> = z
                .iter()
                .enumerate()
                .filter(|(i, _)| keep_ref.is_none_or(|k| k(i + 1)))
                .map(|(_, v)| *v)
                .collect();
            if kept.is_empty() {
                return Err(AveragesError::AllExcluded);
            }
            let value = Observable::Fourier(coeffs.iter().map(|(&k, c)| (k, c * power_mean(&kept, k))).collect());
            Ok(AverageReport {
                value,
                n,
                contributing: kept.len() as u64,
                excluded: (n - kept.len()) as u64,
                warnings: vec![],
            })
        }
        _ => {
            let h = progression_histogram(action, a, b, n, keep_ref)?;
            Ok(report(weighted_products(&[action], &[f], &h)?, n, &h, vec![]))
        }
    }
}

/// `E z^k` with compensated summation.
fn power_mean(z: &[Complex64], k: i64) -> Complex64 {
    let parts = par::map_chunks(z.len(), par::DEFAULT_CHUNK, |r| {
        z[r].iter().map(|v| v.powi(k as i32)).collect::<ComplexSum>()
    });
    crate::sum::merge_complex(&parts) / z.len() as f64
}

fn linear(forms: &[LinearForm]) -> Result<Vec<RationalPolynomialFL>, AveragesError> {
    Ok(forms
        .iter()
        .map(|f| RationalPolynomialFL::from_factors(vec![(*f, 1)]))
        .collect::<Result<_, _>>()?)
}

fn dependence_warnings(forms: &[LinearForm]) -> Vec<String> {
    let mut w = Vec::new();
    for i in 0..forms.len() {
        for j in i + 1..forms.len() {
            if !independent(&forms[i], &forms[j]) {
                w.push(format!("forms {} and {} are not independent", forms[i], forms[j]));
            }
        }
    }
    w
}

/// `E_{m,n ∈ [N]} ∏_j T_{j, L_j(grid(m,n))} F_j` on a common space.
pub fn multilinear_average(
    actions: &[&Action],
    fs: &[&Observable],
    forms: &[LinearForm],
    grid: &Grid2D,
    n: usize,
) -> Result<AverageReport, AveragesError> {
    check_len(actions.len(), fs.len())?;
    check_len(actions.len(), forms.len())?;
    let rs = linear(forms)?;
    let mut r = rational_average(actions, fs, &rs, grid, n, None)?;
    r.warnings = dependence_warnings(forms);
    Ok(r)
}

/// `E ∏_j T_{j, R_j(grid(m,n))} F_j` over the points accepted by `filter`
/// at which every factor of every `R_j` is positive.
pub fn rational_average(
    actions: &[&Action],
    fs: &[&Observable],
    rs: &[RationalPolynomialFL],
    grid: &Grid2D,
    n: usize,
    filter: Option<&(dyn Fn(i64, i64) -> bool + Sync)>,
) -> Result<AverageReport, AveragesError> {
    check_len(actions.len(), fs.len())?;
    check_len(actions.len(), rs.len())?;
    if actions.is_empty() {
        return Err(AveragesError::InvalidArgument("no iterates".into()));
    }
    for a in actions {
        discrete(a)?;
    }
    let its: Vec<IterateSpec> = actions
        .iter()
        .zip(rs)
        .map(|(a, r)| IterateSpec {
            source: *a as &dyn CodeSource,
            r: r.clone(),
        })
        .collect();
    let h = grid_histogram(&its, grid, n, filter)?;
    Ok(report(weighted_products(actions, fs, &h)?, n, &h, vec![]))
}

/// `E T_{1,R₁(m,n)} F₁ · T_{2,R₂(m,n)} F₂`.
#[allow(clippy::too_many_arguments)]
pub fn rational_pair_average(
    action1: &Action,
    action2: &Action,
    f1: &Observable,
    f2: &Observable,
    r1: &RationalPolynomialFL,
    r2: &RationalPolynomialFL,
    grid: &Grid2D,
    n: usize,
    filter: Option<&(dyn Fn(i64, i64) -> bool + Sync)>,
) -> Result<AverageReport, AveragesError> {
    rational_average(
        &[action1, action2],
        &[f1, f2],
        &[r1.clone(), r2.clone()],
        grid,
        n,
        filter,
    )
}

/// Distribution of `μ(A ∩ ∩_j T_{j,R_j(m,n)}^{-1} A)` over the grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceProfile {
    pub measure_a: f64,
    pub ell: usize,
    pub epsilon: f64,
    /// `μ(A)^{ℓ+1} - ε`.
    pub benchmark: f64,
    pub n: usize,
    pub contributing: u64,
    pub excluded: u64,
    /// Points whose measure reaches the benchmark.
    pub good: u64,
    /// `good / contributing`: an empirical density at this `N`, not a lower density.
    pub good_density: f64,
    /// Average of the measures over contributing points.
    pub mean_measure: f64,
    pub min_measure: f64,
    pub max_measure: f64,
    /// `(measure, number of points)`, ascending in measure.
    pub distribution: Vec<(f64, u64)>,
}

/// Intersection measures for every grid point, summarized.
#[allow(clippy::too_many_arguments)]
pub fn recurrence_profile(
    actions: &[&Action],
    a: &Observable,
    rs: &[RationalPolynomialFL],
    grid: &Grid2D,
    n: usize,
    epsilon: f64,
    filter: Option<&(dyn Fn(i64, i64) -> bool + Sync)>,
) -> Result<RecurrenceProfile, AveragesError> {
    check_len(actions.len(), rs.len())?;
    if !a.is_indicator() {
        return Err(ActionError::WrongObservable.into());
    }
    let ind = a.as_vector().unwrap();
    let size = ind.len();
    for act in actions {
        if discrete(act)? != size {
            return Err(ActionError::SpaceMismatch {
                left: discrete(act)?,
                right: size,
            }
            .into());
        }
    }
    let in_a: Vec<usize> = (0..size).filter(|&x| ind[x].re == 1.0).collect();
    if in_a.is_empty() {
        return Err(AveragesError::EmptySet);
    }
    let measure_a = in_a.len() as f64 / size as f64;
    let ell = rs.len();
    let benchmark = measure_a.powi(ell as i32 + 1) - epsilon;
    let its: Vec<IterateSpec> = actions
        .iter()
        .zip(rs)
        .map(|(act, r)| IterateSpec {
            source: *act as &dyn CodeSource,
            r: r.clone(),
        })
        .collect();
    let h = grid_histogram(&its, grid, n, filter)?;
    if h.contributing == 0 {
        return Err(AveragesError::AllExcluded);
    }
    let counts: Vec<usize> = par::map_ordered(&h.entries, |(codes, _)| {
        in_a.iter()
            .filter(|&&x| {
                actions
                    .iter()
                    .zip(codes)
                    .all(|(act, &c)| ind[act.map_point(c, x)].re == 1.0)
            })
            .count()
    });
    let mut dist: BTreeMap<usize, u64> = BTreeMap::new();
    for (c, (_, cnt)) in counts.iter().zip(&h.entries) {
        *dist.entry(*c).or_default() += cnt;
    }
    let mu = |c: usize| c as f64 / size as f64;
    let good: u64 = dist.iter().filter(|(c, _)| mu(**c) >= benchmark).map(|(_, k)| k).sum();
    let weighted: u128 = dist.iter().map(|(c, k)| *c as u128 * *k as u128).sum();
    Ok(RecurrenceProfile {
        measure_a,
        ell,
        epsilon,
        benchmark,
        n,
        contributing: h.contributing,
        excluded: h.excluded,
        good,
        good_density: good as f64 / h.contributing as f64,
        mean_measure: weighted as f64 / (h.contributing as f64 * size as f64),
        min_measure: mu(*dist.keys().next().unwrap()),
        max_measure: mu(*dist.keys().next_back().unwrap()),
        distribution: dist.into_iter().map(|(c, k)| (mu(c), k)).collect(),
    })
}

/// Recurrence profiles on the grids `(Qm + m₀, Qn + n₀)` for sampled `Q ∈ Φ_K`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QTrickProfile {
    pub k: u32,
    pub per_q: Vec<(u128, RecurrenceProfile)>,
    pub mean_good_density: f64,
    pub min_good_density: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QTrick {
    pub k: u32,
    pub samples: usize,
    #[serde(default)]
    pub offset_m: i64,
    #[serde(default)]
    pub offset_n: i64,
}

/// Samples `Q ∈ Φ_K` deterministically.
pub fn sample_q(k: u32, samples: usize, seed: u64) -> Result<Vec<u128>, AveragesError> {
    phi_k_elements(k, samples, seed)?
        .iter()
        .map(|e| {
            e.to_u128()
                .ok_or_else(|| AveragesError::InvalidArgument(format!("Q = {} does not fit", e.value)))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn recurrence_profile_q(
    actions: &[&Action],
    a: &Observable,
    rs: &[RationalPolynomialFL],
    q: &QTrick,
    seed: u64,
    n: usize,
    epsilon: f64,
) -> Result<QTrickProfile, AveragesError> {
    let qs = sample_q(q.k, q.samples, seed)?;
    let mut per_q = Vec::with_capacity(qs.len());
    for &big_q in &qs {
        let step = u64::try_from(big_q).map_err(|_| AveragesError::InvalidArgument("Q too large".into()))?;
        let grid = Grid2D {
            a1: step,
            b1: q.offset_m,
            a2: step,
            b2: q.offset_n,
        };
        per_q.push((big_q, recurrence_profile(actions, a, rs, &grid, n, epsilon, None)?));
    }
    let dens: Vec<f64> = per_q.iter().map(|(_, p)| p.good_density).collect();
    Ok(QTrickProfile {
        k: q.k,
        mean_good_density: dens.iter().copied().collect::<Neumaier>().value() / dens.len().max(1) as f64,
        min_good_density: dens.iter().copied().fold(f64::INFINITY, f64::min),
        per_q,
    })
}

/// What `T_{Qn+b}F` is compared with in [`concentration_statistic`].
#[derive(Clone, Debug, PartialEq)]
pub enum Reference {
    /// `T_b F`; needs `b ≥ 1`.
    Base,
    /// `E_n T_{Qn+b} F` over the same (restricted) range.
    RunningAverage,
    Explicit(Observable),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub value: f64,
    pub contributing: u64,
    pub excluded: u64,
}

/// `E_n ‖T_{Qn+b} F - reference‖_{L²}` over `n ∈ [N]`, restricted to `n ∈ S_δ` if given.
pub fn concentration_statistic(
    action: &Action,
    f: &Observable,
    q: u128,
    b: i128,
    n: usize,
    reference: &Reference,
    restriction: Option<&SdeltaSpec>,
) -> Result<ConcentrationReport, AveragesError> {
    if b == 0 {
        return Err(AveragesError::InvalidArgument("b must be nonzero".into()));
    }
    let reference = match reference {
        Reference::Base => {
            if b < 1 {
                return Err(AveragesError::InvalidArgument("the T_b F reference needs b ≥ 1".into()));
            }
            Some(action.apply((b as u128, 1), f)?)
        }
        Reference::RunningAverage => None,
        Reference::Explicit(r) => Some(r.clone()),
    };
    let keep = restriction.map(|s| move |i: usize| s.contains(i as u128));
    let keep_ref = keep.as_ref().map(|k| k as &(dyn Fn(usize) -> bool + Sync));
    match action {
        Action::Fourier(rot) => {
            let coeffs = fourier_coefficients(f)?;
            let z = rot.function().progression_values(q, b, n)?;
            let kept: Vec<Complex64> = z
                .iter()
                .enumerate()
                .filter(|(i, _)| keep_ref.is_none_or(|k| k(i + 1)))
                .map(|(_, v)| *v)
                .collect();
            if kept.is_empty() {
                return Err(AveragesError::AllExcluded);
            }
            let reference = match reference {
                Some(r) => fourier_coefficients(&r)?.clone(),
                None => coeffs.iter().map(|(&k, c)| (k, c * power_mean(&kept, k))).collect(),
            };
            let extra: f64 = reference
                .iter()
                .filter(|(k, _)| !coeffs.contains_key(k))
                .map(|(_, r)| r.norm_sqr())
                .sum();
            let parts = par::map_chunks(kept.len(), par::DEFAULT_CHUNK, |r| {
                kept[r]
                    .iter()
                    .map(|zv| {
                        let s: f64 = coeffs
                            .iter()
                            .map(|(&k, c)| {
                                (c * zv.powi(k as i32) - reference.get(&k).copied().unwrap_or_default()).norm_sqr()
                            })
                            .sum();
                        (s + extra).sqrt()
                    })
                    .collect::<Neumaier>()
            });
            let mut total = Neumaier::new();
            for p in &parts {
                total.merge(p);
            }
            Ok(ConcentrationReport {
                value: total.value() / kept.len() as f64,
                contributing: kept.len() as u64,
                excluded: (n - kept.len()) as u64,
            })
        }
        _ => {
            let h = progression_histogram(action, q, b, n, keep_ref)?;
            if h.contributing == 0 {
                return Err(AveragesError::AllExcluded);
            }
            let reference = match reference {
                Some(r) => r,
                None => weighted_products(&[action], &[f], &h)?,
            };
            let dists = par::map_ordered(&h.entries, |(codes, _)| {
                action.apply_code(codes[0], f).and_then(|img| img.distance(&reference))
            });
            let mut total = Neumaier::new();
            for (d, (_, cnt)) in dists.into_iter().zip(&h.entries) {
                total.add(d? * *cnt as f64);
            }
            Ok(ConcentrationReport {
                value: total.value() / h.contributing as f64,
                contributing: h.contributing,
                excluded: h.excluded,
            })
        }
    }
}

/// `∫ T_r F · conj(T_s F) dμ`.
pub fn correlation(
    action: &Action,
    f: &Observable,
    r: (u128, u128),
    s: (u128, u128),
) -> Result<Complex64, AveragesError> {
    Ok(action.apply(r, f)?.inner(&action.apply(s, f)?)?)
}

/// Estimated split `F = F_p + F_a`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Projection {
    pub f_p: Observable,
    pub f_a: Observable,
    pub qs: Vec<u128>,
    /// `(q, r, ‖E_{n ∈ [N']} T_{qn+r} F_a‖)`.
    pub aperiodicity: Vec<(u128, i128, f64)>,
    pub max_aperiodicity: f64,
}

/// `F_p ≈ E_Q E_{n ∈ [N]} T_{Qn+1} F` over sampled `Q ∈ Φ_K`, `F_a = F - F_p`.
#[allow(clippy::too_many_arguments)]
pub fn pretentious_projection(
    action: &Action,
    f: &Observable,
    k: u32,
    q_samples: usize,
    seed: u64,
    n: usize,
    diagnostic_grid: &[(u128, i128)],
    diagnostic_n: usize,
) -> Result<Projection, AveragesError> {
    if !matches!(action, Action::Fg(_)) {
        return Err(AveragesError::Unsupported(
            "the projection estimator needs a finitely generated action",
        ));
    }
    let qs = sample_q(k, q_samples, seed)?;
    if qs.is_empty() {
        return Err(AveragesError::InvalidArgument("no Q sampled".into()));
    }
    let size = discrete(action)?;
    let mut acc = vec![ComplexSum::new(); size];
    for &q in &qs {
        let avg = single_average(action, f, q, 1, n)?;
        for (s, v) in acc.iter_mut().zip(avg.value.as_vector().unwrap()) {
            s.add(*v);
        }
    }
    let f_p = Observable::Vector(acc.iter().map(|s| s.value() / qs.len() as f64).collect());
    let f_a = f.sub(&f_p)?;
    let mut aperiodicity = Vec::with_capacity(diagnostic_grid.len());
    for &(q, r) in diagnostic_grid {
        let avg = single_average(action, &f_a, q, r, diagnostic_n)?;
        aperiodicity.push((q, r, avg.l2_norm()));
    }
    let max_aperiodicity = aperiodicity.iter().map(|t| t.2).fold(0.0, f64::max);
    Ok(Projection {
        f_p,
        f_a,
        qs,
        aperiodicity,
        max_aperiodicity,
    })
}

/// `E_{m,n ∈ [N]} ∏_j F_j ∘ S_j^{a_j(L_j(m,n))}` on the product of the spaces of the `S_j`.
///
/// The product space is indexed with the first factor varying fastest.
pub fn omega_product_average(
    base_perms: &[Permutation],
    addseqs: &[CompletelyAdditiveSequence],
    fs: &[Observable],
    forms: &[LinearForm],
    n: usize,
) -> Result<AverageReport, AveragesError> {
    let l = base_perms.len();
    check_len(l, addseqs.len())?;
    check_len(l, fs.len())?;
    check_len(l, forms.len())?;
    let actions: Vec<Action> = base_perms
        .iter()
        .zip(addseqs)
        .map(|(p, s)| FgAction::new(p.size(), vec![(p.clone(), s.clone())]).map(Action::Fg))
        .collect::<Result<_, _>>()?;
    let sizes: Vec<usize> = actions.iter().map(|a| a.size().unwrap()).collect();
    for (f, &s) in fs.iter().zip(&sizes) {
        if f.len() != s || f.as_vector().is_none() {
            return Err(ActionError::SpaceMismatch {
                left: s,
                right: f.len(),
            }
            .into());
        }
    }
    let total: usize = sizes
        .iter()
        .try_fold(1usize, |acc, &s| acc.checked_mul(s))
        .unwrap_or(usize::MAX);
    if total > 1 << 24 {
        return Err(AveragesError::InvalidArgument("product space too large".into()));
    }
    let rs = linear(forms)?;
    let its: Vec<IterateSpec> = actions
        .iter()
        .zip(&rs)
        .map(|(a, r)| IterateSpec {
            source: a as &dyn CodeSource,
            r: r.clone(),
        })
        .collect();
    let h = grid_histogram(&its, &Grid2D::full(), n, None)?;
    if h.contributing == 0 {
        return Err(AveragesError::AllExcluded);
    }
    let mut acc = vec![ComplexSum::new(); total];
    for (codes, count) in &h.entries {
        let imgs: Vec<Observable> = actions
            .iter()
            .zip(fs)
            .zip(codes)
            .map(|((a, f), &c)| a.apply_code(c, f))
            .collect::<Result<_, _>>()?;
        let mut tensor = vec![Complex64::new(*count as f64, 0.0)];
        for img in &imgs {
            let v = img.as_vector().unwrap();
            tensor = v.iter().flat_map(|x| tensor.iter().map(move |t| t * x)).collect();
        }
        for (s, t) in acc.iter_mut().zip(tensor) {
            s.add(t);
        }
    }
    let value = Observable::Vector(acc.iter().map(|s| s.value() / h.contributing as f64).collect());
    Ok(report(value, n, &h, dependence_warnings(forms)))
}

/// Reproducible base-`b` digit expansion of a pseudorandom `x ∈ [0, 1)`.
///
/// Entry `0` is the integer part and is always zero.
pub fn digit_stream(base: u8, len: usize, seed: u64, stream: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut d = Vec::with_capacity(len);
    if len > 0 {
        d.push(0);
    }
    d.extend((1..len).map(|_| rng.gen_range(0..base)));
    d
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DigitReport {
    pub frequency: f64,
    pub hits: u64,
    pub contributing: u64,
    pub excluded: u64,
}

/// Frequency over `(m, n) ∈ [N]²` of `dig_{b_j}(x_j; a_j(L_j(m, n))) = c_j` for all `j`.
pub fn digit_density(
    bases: &[u8],
    targets: &[u8],
    addseqs: &[CompletelyAdditiveSequence],
    forms: &[LinearForm],
    streams: &[Vec<u8>],
    n: usize,
) -> Result<DigitReport, AveragesError> {
    let l = bases.len();
    check_len(l, targets.len())?;
    check_len(l, addseqs.len())?;
    check_len(l, forms.len())?;
    check_len(l, streams.len())?;
    for j in 0..l {
        if bases[j] < 2 || targets[j] >= bases[j] {
            return Err(AveragesError::InvalidArgument(format!(
                "target {} is not a base-{} digit",
                targets[j], bases[j]
            )));
        }
        if streams[j].iter().any(|&d| d >= bases[j]) {
            return Err(AveragesError::InvalidArgument(format!(
                "stream {j} has a digit ≥ {}",
                bases[j]
            )));
        }
    }
    let sources: Vec<AdditiveSource> = addseqs.iter().map(AdditiveSource).collect();
    let rs = linear(forms)?;
    let its: Vec<IterateSpec> = sources
        .iter()
        .zip(&rs)
        .map(|(s, r)| IterateSpec {
            source: s as &dyn CodeSource,
            r: r.clone(),
        })
        .collect();
    let h = grid_histogram(&its, &Grid2D::full(), n, None)?;
    if h.contributing == 0 {
        return Err(AveragesError::AllExcluded);
    }
    let mut hits = 0u64;
    for (codes, count) in &h.entries {
        let mut ok = true;
        for j in 0..l {
            let idx = codes[j] as i128;
            if idx < 0 {
                return Err(AveragesError::InvalidArgument("negative digit index".into()));
            }
            let d = streams[j]
                .get(idx as usize)
                .ok_or_else(|| AveragesError::InvalidArgument(format!("stream {j} shorter than index {idx}")))?;
            ok &= *d == targets[j];
        }
        if ok {
            hits += count;
        }
    }
    Ok(DigitReport {
        frequency: hits as f64 / h.contributing as f64,
        hits,
        contributing: h.contributing,
        excluded: h.excluded,
    })
}

/// Both sides of the inequality
/// `E_{m,n ≤ N} ‖v(l₁m + l₂n) - v_N‖ ≤ 4(l₁ + l₂) E_{n ≤ N} ‖v(n) - v_N‖`
/// for `v(n) = T_{Qn+b} F` and `v_N = E_{n ≤ N} v(n)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaLnCheck {
    pub epsilon: f64,
    pub lhs: f64,
    pub bound: f64,
    /// `max(0, lhs - bound)`.
    pub slack: f64,
}

pub fn lemma_ln_check(
    action: &Action,
    f: &Observable,
    q: u128,
    b: i128,
    l: (u32, u32),
    n: usize,
) -> Result<LemmaLnCheck, AveragesError> {
    let (l1, l2) = (l.0 as usize, l.1 as usize);
    if l1 == 0 || l2 == 0 {
        return Err(AveragesError::InvalidArgument("l₁, l₂ must be positive".into()));
    }
    discrete(action)?;
    let top = (l1 + l2) * n;
    let codes = action.codes_on_progression(q, b, top)?;
    if codes.iter().any(Option::is_none) {
        return Err(AveragesError::InvalidArgument(
            "the progression meets non-invertible arguments".into(),
        ));
    }
    let h = progression_histogram(action, q, b, n, None)?;
    let v_n = weighted_products(&[action], &[f], &h)?;
    let mut dist: BTreeMap<u128, f64> = BTreeMap::new();
    for c in codes.iter().flatten() {
        if !dist.contains_key(c) {
            dist.insert(*c, action.apply_code(*c, f)?.distance(&v_n)?);
        }
    }
    let d = |t: usize| codes[t - 1].map(|c| dist[&c]);
    let mut eps = Neumaier::new();
    for t in 1..=n {
        eps.add(d(t).ok_or(AveragesError::AllExcluded)?);
    }
    let rows = par::map_chunks(n, 64, |r| {
        let mut s = Neumaier::new();
        for mi in r {
            for k in 1..=n {
                s.add(d(l1 * (mi + 1) + l2 * k).expect("all codes present"));
            }
        }
        s
    });
    let mut lhs = Neumaier::new();
    for r in &rows {
        lhs.merge(r);
    }
    let epsilon = eps.value() / n as f64;
    let lhs = lhs.value() / (n * n) as f64;
    let bound = 4.0 * (l1 + l2) as f64 * epsilon;
    Ok(LemmaLnCheck {
        epsilon,
        lhs,
        bound,
        slack: (lhs - bound).max(0.0),
    })
}

#[cfg(test)]
mod tests;
