//! Homogeneous quadratic equations `ax² + by² = dxy + exz + fyz` with `a + b = d`.

use serde::{Deserialize, Serialize};

use crate::linforms::{independent, LinFormError, LinearForm};
use crate::par;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EquationError {
    #[error("a + b must equal d (got a={a}, b={b}, d={d})")]
    Hypothesis { a: i64, b: i64, d: i64 },
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("shift l={l} needs l·e + f > 0 and l·a - b >= 0")]
    InvalidShift { l: i64 },
    #[error("family does not satisfy the equation: residual {0:?}")]
    NotASolution([i128; 5]),
    #[error(transparent)]
    Form(#[from] LinFormError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadEquation {
    pub a: i64,
    pub b: i64,
    pub d: i64,
    pub e: i64,
    pub f: i64,
}

impl QuadEquation {
    pub fn new(a: i64, b: i64, d: i64, e: i64, f: i64) -> Result<Self, EquationError> {
        let eq = Self { a, b, d, e, f };
        eq.validate()?;
        Ok(eq)
    }

    pub fn validate(&self) -> Result<(), EquationError> {
        if self.a <= 0 {
            return Err(EquationError::NonPositive("a"));
        }
        if self.e <= 0 {
            return Err(EquationError::NonPositive("e"));
        }
        if self.a + self.b != self.d {
            return Err(EquationError::Hypothesis {
                a: self.a,
                b: self.b,
                d: self.d,
            });
        }
        Ok(())
    }

    /// `ax² + by² - dxy - exz - fyz`.
    pub fn residual(&self, x: i128, y: i128, z: i128) -> i128 {
        let (a, b, d, e, f) = (
            self.a as i128,
            self.b as i128,
            self.d as i128,
            self.e as i128,
            self.f as i128,
        );
        a * x * x + b * y * y - d * x * y - e * x * z - f * y * z
    }

    pub fn holds(&self, x: i128, y: i128, z: i128) -> bool {
        self.residual(x, y, z) == 0
    }
}

impl std::fmt::Display for QuadEquation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}x^2 + {}y^2 = {}xy + {}xz + {}yz",
            self.a, self.b, self.d, self.e, self.f
        )
    }
}

/// Coefficients of `m², mn, n²`.
pub type Quadratic = [i128; 3];
/// Coefficients of `m⁴, m³n, m²n², mn³, n⁴`.
pub type Quartic = [i128; 5];

/// Product of two linear forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormProduct(pub LinearForm, pub LinearForm);

impl FormProduct {
    #[inline]
    pub fn eval(&self, m: i64, n: i64) -> i128 {
        self.0.eval(m, n) * self.1.eval(m, n)
    }

    pub fn expand(&self) -> Quadratic {
        let (a1, b1) = (self.0.alpha as i128, self.0.beta as i128);
        let (a2, b2) = (self.1.alpha as i128, self.1.beta as i128);
        [a1 * a2, a1 * b2 + b1 * a2, b1 * b2]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.0.is_nonnegative() && self.1.is_nonnegative()
    }
}

impl std::fmt::Display for FormProduct {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({})({})", self.0, self.1)
    }
}

fn mul(p: &Quadratic, q: &Quadratic) -> Quartic {
    let mut out = [0i128; 5];
    for i in 0..3 {
        for j in 0..3 {
            out[i + j] += p[i] * q[j];
        }
    }
    out
}

/// Parametrized solutions `(x, y, z)(m, n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolutionFamily {
    pub x: FormProduct,
    pub y: FormProduct,
    pub z: FormProduct,
}

impl SolutionFamily {
    pub fn eval(&self, m: i64, n: i64) -> (i128, i128, i128) {
        (self.x.eval(m, n), self.y.eval(m, n), self.z.eval(m, n))
    }

    /// The equation after substitution, expanded as a quartic in `(m, n)`.
    pub fn substituted(&self, eq: &QuadEquation) -> Quartic {
        let (x, y, z) = (self.x.expand(), self.y.expand(), self.z.expand());
        let terms = [
            (eq.a as i128, mul(&x, &x)),
            (eq.b as i128, mul(&y, &y)),
            (-(eq.d as i128), mul(&x, &y)),
            (-(eq.e as i128), mul(&x, &z)),
            (-(eq.f as i128), mul(&y, &z)),
        ];
        let mut out = [0i128; 5];
        for (c, t) in terms {
            for i in 0..5 {
                out[i] += c * t[i];
            }
        }
        out
    }

    pub fn verify(&self, eq: &QuadEquation) -> Result<(), EquationError> {
        let r = self.substituted(eq);
        if r.iter().all(|&c| c == 0) {
            Ok(())
        } else {
            Err(EquationError::NotASolution(r))
        }
    }

    pub fn is_nonnegative(&self) -> bool {
        self.x.is_nonnegative() && self.y.is_nonnegative() && self.z.is_nonnegative()
    }
}

fn lf(alpha: i64, beta: i64) -> Result<LinearForm, EquationError> {
    Ok(LinearForm::new(alpha, beta)?)
}

/// `(m(em+fn), n(em+fn), (m-n)(am-bn))`.
pub fn solution_family(eq: &QuadEquation) -> Result<SolutionFamily, EquationError> {
    eq.validate()?;
    let w = lf(eq.e, eq.f)?;
    let fam = SolutionFamily {
        x: FormProduct(LinearForm::m(), w),
        y: FormProduct(LinearForm::n(), w),
        z: FormProduct(lf(1, -1)?, lf(eq.a, -eq.b)?),
    };
    fam.verify(eq)?;
    Ok(fam)
}

fn check_shift(eq: &QuadEquation, l: i64) -> Result<(), EquationError> {
    eq.validate()?;
    if l < 1 || l * eq.e + eq.f <= 0 || l * eq.a - eq.b < 0 {
        return Err(EquationError::InvalidShift { l });
    }
    Ok(())
}

/// The family after `m ↦ m + l·n`; every coefficient is nonnegative.
pub fn shifted_family(eq: &QuadEquation, l: i64) -> Result<SolutionFamily, EquationError> {
    check_shift(eq, l)?;
    let w = lf(eq.e, l * eq.e + eq.f)?;
    let fam = SolutionFamily {
        x: FormProduct(lf(1, l)?, w),
        y: FormProduct(LinearForm::n(), w),
        z: FormProduct(lf(1, l - 1)?, lf(eq.a, l * eq.a - eq.b)?),
    };
    fam.verify(eq)?;
    Ok(fam)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecurrenceForms {
    pub l1: LinearForm,
    pub l2: LinearForm,
    pub l3: LinearForm,
    pub l4: LinearForm,
    /// Nonnegativity of `L₁, L₂, L₃, L₄, L₃ - L₄`.
    pub nonnegative: [bool; 5],
    pub l3_l4_independent: bool,
    pub l1_diff_independent: bool,
    pub l2_diff_independent: bool,
    /// `a = d = e = -f`, `b = 0`.
    pub degenerate: bool,
}

impl RecurrenceForms {
    pub fn all_hold(&self) -> bool {
        self.nonnegative.iter().all(|&b| b)
            && self.l3_l4_independent
            && self.l1_diff_independent
            && self.l2_diff_independent
    }

    pub fn difference(&self) -> LinearForm {
        self.l3.sub(&self.l4).expect("L3 - L4 has m-coefficient 1")
    }
}

/// `L₁ = am + (la - b)n`, `L₂ = em + (le + f)n`, `L₃ = m + ln`, `L₄ = n`.
pub fn to_recurrence_forms(eq: &QuadEquation, l: i64) -> Result<RecurrenceForms, EquationError> {
    check_shift(eq, l)?;
    let l1 = lf(eq.a, l * eq.a - eq.b)?;
    let l2 = lf(eq.e, l * eq.e + eq.f)?;
    let l3 = lf(1, l)?;
    let l4 = LinearForm::n();
    Ok(report(l1, l2, l3, l4, eq))
}

pub(crate) fn report(
    l1: LinearForm,
    l2: LinearForm,
    l3: LinearForm,
    l4: LinearForm,
    eq: &QuadEquation,
) -> RecurrenceForms {
    let diff = l3.sub(&l4).ok();
    let indep = |x: &LinearForm| diff.as_ref().is_some_and(|d| independent(x, d));
    RecurrenceForms {
        l1,
        l2,
        l3,
        l4,
        nonnegative: [
            l1.is_nonnegative(),
            l2.is_nonnegative(),
            l3.is_nonnegative(),
            l4.is_nonnegative(),
            diff.as_ref().is_some_and(LinearForm::is_nonnegative),
        ],
        l3_l4_independent: independent(&l3, &l4),
        l1_diff_independent: indep(&l1),
        l2_diff_independent: indep(&l2),
        degenerate: eq.a == eq.d && eq.d == eq.e && eq.e == -eq.f && eq.b == 0,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TripleFilter {
    #[default]
    NotAllEqual,
    Distinct,
}

impl TripleFilter {
    fn accepts(self, x: u64, y: u64, z: u64) -> bool {
        match self {
            TripleFilter::NotAllEqual => !(x == y && y == z),
            TripleFilter::Distinct => x != y && y != z && x != z,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchBounds {
    /// Every entry must lie in `[1, limit]`.
    pub limit: u64,
    pub k_max: u64,
    pub m_max: i64,
    pub n_max: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MonochromaticTriple {
    pub k: u64,
    pub m: i64,
    pub n: i64,
    pub x: u64,
    pub y: u64,
    pub z: u64,
    pub color: u32,
}

/// Every `(kx, ky, kz)` from `family` inside `[1, limit]` whose entries share a color.
///
/// Results are ordered by `k`, then `m`, then `n`.
pub fn monochromatic_search<C>(
    family: &SolutionFamily,
    coloring: C,
    bounds: &SearchBounds,
    filter: TripleFilter,
) -> Vec<MonochromaticTriple>
where
    C: Fn(u64) -> u32 + Sync + Send,
{
    let ks: Vec<u64> = (1..=bounds.k_max).collect();
    let limit = bounds.limit as i128;
    let per_k = par::map_ordered(&ks, |&k| {
        let mut found = Vec::new();
        let kk = k as i128;
        for m in 1..=bounds.m_max {
            for n in 1..=bounds.n_max {
                let (x, y, z) = family.eval(m, n);
                let (x, y, z) = (kk * x, kk * y, kk * z);
                if [x, y, z].iter().any(|&v| v < 1 || v > limit) {
                    continue;
                }
                let (x, y, z) = (x as u64, y as u64, z as u64);
                if !filter.accepts(x, y, z) {
                    continue;
                }
                let c = coloring(x);
                if coloring(y) == c && coloring(z) == c {
                    found.push(MonochromaticTriple {
                        k,
                        m,
                        n,
                        x,
                        y,
                        z,
                        color: c,
                    });
                }
            }
        }
        found
    });
    per_k.into_iter().flatten().collect()
}
