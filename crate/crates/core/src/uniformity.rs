//! Gowers uniformity norms on `Z_N`, mixed seminorms of actions and the
//! related diagnostics.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actions::{Action, ActionError, Observable};
use crate::averages::{single_average, AveragesError};
use crate::numtheory::is_prime;
use crate::par;
use crate::sum::{ComplexSum, Neumaier};

/// Work budget shared by every evaluation route.
pub const WORK_LIMIT: f64 = 1e9;

#[derive(Debug, Error)]
pub enum UniformityError {
    #[error("empty sequence")]
    Empty,
    #[error("order s must be at least 1")]
    InvalidOrder,
    #[error("U^{s} on Z_{n} exceeds the work budget")]
    CostGuard { n: usize, s: u32 },
    #[error("degenerate correlation: {0}")]
    Degenerate(&'static str),
    #[error("shape mismatch: expected {expected} entries, got {got}")]
    Shape { expected: usize, got: usize },
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Averages(#[from] AveragesError),
}

/// A finite sequence read as a function on `Z_N`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodizedSequence {
    values: Vec<Complex64>,
}

impl PeriodizedSequence {
    pub fn new(values: Vec<Complex64>) -> Result<Self, UniformityError> {
        if values.is_empty() {
            return Err(UniformityError::Empty);
        }
        Ok(Self { values })
    }

    pub fn from_real(values: impl IntoIterator<Item = f64>) -> Result<Self, UniformityError> {
        Self::new(values.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Value at `n mod N`.
    pub fn at(&self, n: usize) -> Complex64 {
        self.values[n % self.values.len()]
    }

    /// `a · conj(a_h)` where `a_h(n) = a(n + h)`.
    pub fn multiplicative_derivative(&self, h: usize) -> PeriodizedSequence {
        PeriodizedSequence {
            values: derivative(&self.values, h),
        }
    }

    pub fn add(&self, other: &PeriodizedSequence) -> Result<PeriodizedSequence, UniformityError> {
        if self.len() != other.len() {
            return Err(UniformityError::Shape {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(PeriodizedSequence {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        })
    }
}

fn derivative(a: &[Complex64], h: usize) -> Vec<Complex64> {
    let n = a.len();
    (0..n).map(|i| a[i] * a[(i + h) % n].conj()).collect()
}

fn mean(a: &[Complex64]) -> Complex64 {
    let mut s = ComplexSum::new();
    for &z in a {
        s.add(z);
    }
    s.value() / a.len() as f64
}

fn check_order(a: &PeriodizedSequence, s: u32) -> Result<(), UniformityError> {
    if s == 0 {
        return Err(UniformityError::InvalidOrder);
    }
    if a.is_empty() {
        return Err(UniformityError::Empty);
    }
    Ok(())
}

fn recursion_cost(n: usize, s: u32) -> f64 {
    (n as f64).powi(s as i32)
}

fn fft_cost(n: usize, s: u32) -> f64 {
    let n = n as f64;
    n.powi(s as i32 - 1) * n.log2().max(1.0)
}

/// `‖a‖^{2^s}` straight from the inductive definition.
fn power_recursive(a: &[Complex64], s: u32) -> f64 {
    if s == 1 {
        return mean(a).norm_sqr();
    }
    let n = a.len();
    let mut acc = Neumaier::new();
    for h in 0..n {
        acc.add(power_recursive(&derivative(a, h), s - 1));
    }
    acc.value() / n as f64
}

fn power_recursive_par(a: &[Complex64], s: u32) -> f64 {
    if s == 1 {
        return mean(a).norm_sqr();
    }
    let n = a.len();
    let parts = par::map_chunks(n, chunk_for(n), |r| {
        let mut acc = Neumaier::new();
        for h in r {
            acc.add(power_recursive(&derivative(a, h), s - 1));
        }
        acc
    });
    merge(parts) / n as f64
}

fn chunk_for(n: usize) -> usize {
    (n / 64).clamp(1, 64)
}

fn merge(parts: Vec<Neumaier>) -> f64 {
    let mut acc = Neumaier::new();
    for p in &parts {
        acc.merge(p);
    }
    acc.value()
}

/// `‖a‖^4_{U²} = Σ_ξ |â(ξ)|⁴` with `â(ξ) = E_n a(n) e(−nξ/N)`.
fn power_u2_fft(a: &[Complex64], planner: &mut FftPlanner<f64>) -> f64 {
    let n = a.len();
    let mut buf = a.to_vec();
    planner.plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    let mut acc = Neumaier::new();
    for z in buf {
        acc.add((z * scale).norm_sqr().powi(2));
    }
    acc.value()
}

fn power_u3_fft(a: &[Complex64]) -> f64 {
    let n = a.len();
    let parts = par::map_chunks(n, chunk_for(n), |r| {
        let mut planner = FftPlanner::new();
        let mut acc = Neumaier::new();
        for h in r {
            acc.add(power_u2_fft(&derivative(a, h), &mut planner));
        }
        acc
    });
    merge(parts) / n as f64
}

fn root(power: f64, s: u32) -> f64 {
    power.max(0.0).powf(1.0 / f64::from(1u32 << s))
}

/// `‖a‖_{U^s(Z_N)}` evaluated by the inductive definition only.
///
/// Refuses inputs with `N^s > 10^9`.
pub fn gowers_norm_recursive(a: &PeriodizedSequence, s: u32) -> Result<f64, UniformityError> {
    check_order(a, s)?;
    if recursion_cost(a.len(), s) > WORK_LIMIT {
        return Err(UniformityError::CostGuard { n: a.len(), s });
    }
    Ok(root(power_recursive_par(&a.values, s), s))
}

/// `‖a‖_{U²(Z_N)}` through the Fourier identity.
pub fn gowers_u2_fft(a: &PeriodizedSequence) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    root(power_u2_fft(&a.values, &mut FftPlanner::new()), 2)
}

fn gowers_power(a: &[Complex64], s: u32) -> Result<f64, UniformityError> {
    let n = a.len();
    match s {
        0 => Err(UniformityError::InvalidOrder),
        1 => Ok(mean(a).norm_sqr()),
        2 => Ok(power_u2_fft(a, &mut FftPlanner::new())),
        3 if n > 32 => {
            if fft_cost(n, 3) > WORK_LIMIT {
                return Err(UniformityError::CostGuard { n, s });
            }
            Ok(power_u3_fft(a))
        }
        _ => {
            if recursion_cost(n, s) > WORK_LIMIT {
                return Err(UniformityError::CostGuard { n, s });
            }
            Ok(power_recursive_par(a, s))
        }
    }
}

/// `‖a‖_{U^s(Z_N)}`.
///
/// `U¹` is evaluated directly, `U²` and large-`N` `U³` through the FFT, and
/// everything else by recursion under the work budget.
pub fn gowers_norm(a: &PeriodizedSequence, s: u32) -> Result<f64, UniformityError> {
    check_order(a, s)?;
    Ok(root(gowers_power(&a.values, s)?, s))
}

/// Orbit sequences `(F(T_n x))_{n ∈ [N]}` for every point `x`, row by row.
fn orbit_sequences(action: &Action, f: &Observable, n: usize) -> Result<Vec<Vec<Complex64>>, UniformityError> {
    if action.size().is_none() {
        return Err(ActionError::Unsupported("mixed seminorm needs a finite space").into());
    }
    let vals = f.as_vector().ok_or(ActionError::WrongObservable)?;
    let m = action.size().unwrap_or(0);
    if vals.len() != m {
        return Err(ActionError::SpaceMismatch {
            left: m,
            right: vals.len(),
        }
        .into());
    }
    let codes = action
        .codes_on_progression(1, 0, n)?
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.ok_or(ActionError::NonInvertible(i as u128 + 1)))
        .collect::<Result<Vec<_>, _>>()?;
    let xs: Vec<usize> = (0..m).collect();
    Ok(par::map_ordered(&xs, |&x| {
        codes.iter().map(|&c| vals[action.map_point(c, x)]).collect()
    }))
}

/// `((1/M) Σ_x ‖(F(T_n x))_{n∈[N]}‖^{2^s}_{U^s(Z_N)})^{1/2^s}` at a single `N`.
pub fn mixed_seminorm(action: &Action, f: &Observable, s: u32, n: usize) -> Result<f64, UniformityError> {
    if s == 0 {
        return Err(UniformityError::InvalidOrder);
    }
    if n == 0 {
        return Err(UniformityError::Empty);
    }
    let rows = orbit_sequences(action, f, n)?;
    seminorm_from_rows(&rows, s)
}

fn seminorm_from_rows(rows: &[Vec<Complex64>], s: u32) -> Result<f64, UniformityError> {
    let mut acc = Neumaier::new();
    for row in rows {
        acc.add(gowers_power(row, s)?);
    }
    Ok(root(acc.value() / rows.len() as f64, s))
}

/// One rung of the inverse-theorem ladder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InverseRow {
    pub n: usize,
    /// `max_{(q,r)} ‖E_{n∈[N]} T_{qn+r} F‖_{L²}`.
    pub max_progression_norm: f64,
    pub argmax: (u128, i128),
    /// Mixed seminorms for `s = 1..=s_max`.
    pub seminorms: Vec<f64>,
}

/// Progression averages against mixed seminorms across a ladder of `N`.
pub fn inverse_diagnostic(
    action: &Action,
    f: &Observable,
    qr_grid: &[(u128, i128)],
    n_ladder: &[usize],
    s_max: u32,
) -> Result<Vec<InverseRow>, UniformityError> {
    if !matches!(action, Action::Fg(_)) {
        return Err(ActionError::Unsupported("inverse diagnostic needs a finitely generated action").into());
    }
    if qr_grid.is_empty() || n_ladder.is_empty() {
        return Err(UniformityError::Empty);
    }
    if s_max == 0 {
        return Err(UniformityError::InvalidOrder);
    }
    let mut out = Vec::with_capacity(n_ladder.len());
    for &n in n_ladder {
        let mut best = (f64::NEG_INFINITY, qr_grid[0]);
        for &(q, r) in qr_grid {
            let v = single_average(action, f, q, r, n)?.l2_norm();
            if v > best.0 {
                best = (v, (q, r));
            }
        }
        let rows = orbit_sequences(action, f, n)?;
        let seminorms = (1..=s_max)
            .map(|s| seminorm_from_rows(&rows, s))
            .collect::<Result<Vec<_>, _>>()?;
        out.push(InverseRow {
            n,
            max_progression_norm: best.0,
            argmax: best.1,
            seminorms,
        });
    }
    Ok(out)
}

/// Square array `A(m, n)` for `(m, n) ∈ [N]²`, 1-based.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareArray {
    n: usize,
    values: Vec<Complex64>,
}

impl SquareArray {
    pub fn new(n: usize, values: Vec<Complex64>) -> Result<Self, UniformityError> {
        if n == 0 {
            return Err(UniformityError::Empty);
        }
        if values.len() != n * n {
            return Err(UniformityError::Shape {
                expected: n * n,
                got: values.len(),
            });
        }
        Ok(Self { n, values })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64 + Sync) -> Result<Self, UniformityError> {
        if n == 0 {
            return Err(UniformityError::Empty);
        }
        let rows = par::map_chunks(n, 64, |r| {
            r.flat_map(|i| (1..=n).map(move |j| (i + 1, j)))
                .map(|(i, j)| f(i, j))
                .collect::<Vec<_>>()
        });
        Ok(Self {
            n,
            values: rows.into_iter().flatten().collect(),
        })
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.values[(m - 1) * self.n + (n - 1)]
    }
}

/// `E ⟨A(pm, qn), A(p'm, q'n)⟩` over the largest box where all indices fit.
pub fn katai_correlation(a: &SquareArray, primes: (u64, u64, u64, u64)) -> Result<Complex64, UniformityError> {
    let (p, q, p2, q2) = primes;
    if ![p, q, p2, q2].iter().all(|&x| is_prime(u128::from(x))) {
        return Err(UniformityError::Degenerate("arguments must be prime"));
    }
    if u128::from(p) * u128::from(q2) == u128::from(p2) * u128::from(q) {
        return Err(UniformityError::Degenerate("p/q equals p'/q'"));
    }
    let side = a.side() as u64;
    let mm = (side / p.max(p2)) as usize;
    let nn = (side / q.max(q2)) as usize;
    if mm == 0 || nn == 0 {
        return Err(UniformityError::Degenerate("empty index box"));
    }
    let (p, q, p2, q2) = (p as usize, q as usize, p2 as usize, q2 as usize);
    let parts = par::map_chunks(mm, 64, |r| {
        let mut s = ComplexSum::new();
        for m in r.map(|i| i + 1) {
            for n in 1..=nn {
                s.add(a.get(p * m, q * n) * a.get(p2 * m, q2 * n).conj());
            }
        }
        s
    });
    let mut s = ComplexSum::new();
    for part in &parts {
        s.merge(part);
    }
    Ok(s.value() / (mm * nn) as f64)
}
