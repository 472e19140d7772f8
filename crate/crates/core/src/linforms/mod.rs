//! Linear forms in two variables and rational polynomials that factor into them.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

mod lattice;
mod text;

pub use lattice::{lattice_indicator_check, z_a, LatticeCheck};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinFormError {
    #[error("linear form with both coefficients zero")]
    TrivialForm,
    #[error("constant must be a positive rational, got {0}")]
    NonPositiveConstant(String),
    #[error("forms {0} and {1} are not independent")]
    Dependent(String, String),
    #[error("no factors left after removing the excluded forms")]
    EmptyAfterExclusion,
    #[error("substitution sends {0} to the zero form")]
    DegenerateSubstitution(String),
    #[error("only linear substitutions are supported (constant term {0})")]
    AffineSubstitution(i64),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// `L(m, n) = α·m + β·n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LinearForm {
    pub alpha: i64,
    pub beta: i64,
}

impl LinearForm {
    pub fn new(alpha: i64, beta: i64) -> Result<Self, LinFormError> {
        if alpha == 0 && beta == 0 {
            return Err(LinFormError::TrivialForm);
        }
        Ok(Self { alpha, beta })
    }

    pub const fn m() -> Self {
        Self { alpha: 1, beta: 0 }
    }

    pub const fn n() -> Self {
        Self { alpha: 0, beta: 1 }
    }

    #[inline]
    pub fn eval(&self, m: i64, n: i64) -> i128 {
        self.alpha as i128 * m as i128 + self.beta as i128 * n as i128
    }

    pub fn is_nonnegative(&self) -> bool {
        self.alpha >= 0 && self.beta >= 0
    }

    pub fn content(&self) -> i64 {
        self.alpha.gcd(&self.beta)
    }

    pub fn primitive(&self) -> (i64, LinearForm) {
        let g = self.content();
        (
            g,
            LinearForm {
                alpha: self.alpha / g,
                beta: self.beta / g,
            },
        )
    }

    pub fn sub(&self, other: &LinearForm) -> Result<LinearForm, LinFormError> {
        LinearForm::new(self.alpha - other.alpha, self.beta - other.beta)
    }
}

/// `α₁β₂ ≠ α₂β₁`.
pub fn independent(a: &LinearForm, b: &LinearForm) -> bool {
    a.alpha as i128 * b.beta as i128 != b.alpha as i128 * a.beta as i128
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let term = |c: i64, v: &str| match c.abs() {
            1 => v.to_string(),
            a => format!("{a}{v}"),
        };
        match (self.alpha, self.beta) {
            (0, b) => write!(f, "{}{}", if b < 0 { "-" } else { "" }, term(b, "n")),
            (a, 0) => write!(f, "{}{}", if a < 0 { "-" } else { "" }, term(a, "m")),
            (a, b) => write!(
                f,
                "{}{} {} {}",
                if a < 0 { "-" } else { "" },
                term(a, "m"),
                if b < 0 { "-" } else { "+" },
                term(b, "n")
            ),
        }
    }
}

/// Value of a rational polynomial at an integer point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RpValue {
    Value(BigRational),
    /// A factor with positive exponent vanishes (and none with negative exponent does).
    Zero,
    /// A factor with negative exponent vanishes.
    Undefined,
}

/// `c · ∏ L_j^{k_j}` with pairwise independent primitive forms, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPolynomialFL {
    c: BigRational,
    factors: Vec<(LinearForm, i32)>,
}

impl RationalPolynomialFL {
    pub fn new(c: BigRational, factors: Vec<(LinearForm, i32)>) -> Result<Self, LinFormError> {
        if !c.is_positive() {
            return Err(LinFormError::NonPositiveConstant(c.to_string()));
        }
        let mut c = c;
        let mut prim: Vec<(LinearForm, i32)> = Vec::with_capacity(factors.len());
        for (form, k) in factors {
            if form.alpha == 0 && form.beta == 0 {
                return Err(LinFormError::TrivialForm);
            }
            if k == 0 {
                continue;
            }
            let (g, p) = form.primitive();
            c *= pow_rational(&BigRational::from_integer(BigInt::from(g)), k);
            prim.push((p, k));
        }
        prim.sort_by_key(|(f, _)| *f);
        let mut merged: Vec<(LinearForm, i32)> = Vec::with_capacity(prim.len());
        for (f, k) in prim {
            match merged.last_mut() {
                Some((g, e)) if *g == f => *e += k,
                _ => merged.push((f, k)),
            }
        }
        merged.retain(|&(_, k)| k != 0);
        for i in 0..merged.len() {
            for j in i + 1..merged.len() {
                if !independent(&merged[i].0, &merged[j].0) {
                    return Err(LinFormError::Dependent(
                        merged[i].0.to_string(),
                        merged[j].0.to_string(),
                    ));
                }
            }
        }
        Ok(Self { c, factors: merged })
    }

    pub fn from_factors(factors: Vec<(LinearForm, i32)>) -> Result<Self, LinFormError> {
        Self::new(BigRational::one(), factors)
    }

    /// The constant 1.
    pub fn one() -> Self {
        Self {
            c: BigRational::one(),
            factors: Vec::new(),
        }
    }

    pub fn constant(&self) -> &BigRational {
        &self.c
    }

    pub fn factors(&self) -> &[(LinearForm, i32)] {
        &self.factors
    }

    /// `Σ k_j`.
    pub fn degree(&self) -> i64 {
        self.factors.iter().map(|&(_, k)| k as i64).sum()
    }

    pub fn eval(&self, m: i64, n: i64) -> RpValue {
        let mut zero = false;
        let mut acc = self.c.clone();
        for &(f, k) in &self.factors {
            let v = f.eval(m, n);
            if v == 0 {
                if k < 0 {
                    return RpValue::Undefined;
                }
                zero = true;
                continue;
            }
            acc *= pow_rational(&BigRational::from_integer(BigInt::from(v)), k);
        }
        if zero {
            RpValue::Zero
        } else {
            RpValue::Value(acc)
        }
    }

    /// Some factor with exponent 1 vanishes at `(m0, n0)`.
    pub fn is_simple_zero(&self, m0: i64, n0: i64) -> bool {
        self.factors.iter().any(|&(f, k)| k == 1 && f.eval(m0, n0) == 0)
    }

    /// gcd of the exponents after dropping factors proportional to an excluded form.
    pub fn power_form_order(&self, excluded: Option<(LinearForm, LinearForm)>) -> Result<u64, LinFormError> {
        let keep = |f: &LinearForm| match excluded {
            Some((a, b)) => independent(f, &a) && independent(f, &b),
            None => true,
        };
        let ks: Vec<u64> = self
            .factors
            .iter()
            .filter(|(f, _)| keep(f))
            .map(|&(_, k)| k.unsigned_abs() as u64)
            .collect();
        if ks.is_empty() {
            return Err(LinFormError::EmptyAfterExclusion);
        }
        Ok(ks.into_iter().fold(0, |g, k| g.gcd(&k)))
    }

    /// `∏ L_j^{k_j / r}` with constant 1; `None` if `r` does not divide every exponent.
    pub fn root(&self, r: u32) -> Option<RationalPolynomialFL> {
        if r == 0 || self.factors.iter().any(|&(_, k)| k % r as i32 != 0) {
            return None;
        }
        Some(Self {
            c: BigRational::one(),
            factors: self.factors.iter().map(|&(f, k)| (f, k / r as i32)).collect(),
        })
    }

    /// Applies `m ↦ u₁m + v₁n + w₁`, `n ↦ u₂m + v₂n + w₂`; `w` must vanish.
    pub fn substitute(&self, m_map: (i64, i64, i64), n_map: (i64, i64, i64)) -> Result<Self, LinFormError> {
        for w in [m_map.2, n_map.2] {
            if w != 0 {
                return Err(LinFormError::AffineSubstitution(w));
            }
        }
        let mut out = Vec::with_capacity(self.factors.len());
        for &(f, k) in &self.factors {
            let g = LinearForm {
                alpha: f.alpha * m_map.0 + f.beta * n_map.0,
                beta: f.alpha * m_map.1 + f.beta * n_map.1,
            };
            if g.alpha == 0 && g.beta == 0 {
                return Err(LinFormError::DegenerateSubstitution(f.to_string()));
            }
            out.push((g, k));
        }
        Self::new(self.c.clone(), out)
    }

    pub fn parse(s: &str) -> Result<Self, LinFormError> {
        text::parse_rp(s)
    }

    /// Distinct forms, for callers that evaluate factors directly.
    pub fn forms(&self) -> impl Iterator<Item = &LinearForm> {
        self.factors.iter().map(|(f, _)| f)
    }
}

impl fmt::Display for RationalPolynomialFL {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.c.is_one() || self.factors.is_empty() {
            parts.push(self.c.to_string());
        }
        for &(form, k) in &self.factors {
            if k == 1 {
                parts.push(format!("({form})"));
            } else {
                parts.push(format!("({form})^{k}"));
            }
        }
        write!(f, "{}", parts.join(" * "))
    }
}

impl std::str::FromStr for LinearForm {
    type Err = LinFormError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        text::parse_form(s)
    }
}

impl std::str::FromStr for RationalPolynomialFL {
    type Err = LinFormError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl Serialize for RationalPolynomialFL {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RationalPolynomialFL {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn pow_rational(x: &BigRational, k: i32) -> BigRational {
    let p = num_traits::pow(x.clone(), k.unsigned_abs() as usize);
    if k < 0 {
        p.recip()
    } else {
        p
    }
}

/// The grid `{(a₁m + b₁, a₂n + b₂) : m, n ≥ 1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid2D {
    pub a1: u64,
    pub b1: i64,
    pub a2: u64,
    pub b2: i64,
}

impl Default for Grid2D {
    fn default() -> Self {
        Self::full()
    }
}

impl Grid2D {
    pub const fn full() -> Self {
        Self {
            a1: 1,
            b1: 0,
            a2: 1,
            b2: 0,
        }
    }

    #[inline]
    pub fn point(&self, m: i64, n: i64) -> (i128, i128) {
        (
            self.a1 as i128 * m as i128 + self.b1 as i128,
            self.a2 as i128 * n as i128 + self.b2 as i128,
        )
    }

    /// `L(a₁m + b₁, a₂n + b₂) = (α a₁) m + (β a₂) n + (α b₁ + β b₂)`.
    pub fn pull_back(&self, f: &LinearForm) -> (i128, i128, i128) {
        (
            f.alpha as i128 * self.a1 as i128,
            f.beta as i128 * self.a2 as i128,
            f.alpha as i128 * self.b1 as i128 + f.beta as i128 * self.b2 as i128,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lf(a: i64, b: i64) -> LinearForm {
        LinearForm::new(a, b).unwrap()
    }

    fn int(v: i64) -> RpValue {
        RpValue::Value(BigRational::from_integer(BigInt::from(v)))
    }

    #[test]
    fn independence() {
        assert!(independent(&LinearForm::m(), &LinearForm::n()));
        assert!(!independent(&lf(1, 1), &lf(2, 2)));
        assert!(independent(&lf(1, 1), &lf(1, 2)));
        assert_eq!(LinearForm::new(0, 0), Err(LinFormError::TrivialForm));
    }

    #[test]
    fn evaluation() {
        let r = RationalPolynomialFL::from_factors(vec![(lf(1, 1), 1), (lf(1, 2), 1), (lf(1, 0), -1), (lf(0, 1), -1)])
            .unwrap();
        assert_eq!(r.eval(1, 1), int(6));
        let r = RationalPolynomialFL::from_factors(vec![(lf(1, 0), 1), (lf(1, 1), -1)]).unwrap();
        assert_eq!(r.eval(1, 0), int(1));
        let r = RationalPolynomialFL::from_factors(vec![(lf(0, 1), 1), (lf(1, 1), -1)]).unwrap();
        assert_eq!(r.eval(1, 0), RpValue::Zero);
        assert_eq!(r.eval(1, -1), RpValue::Undefined);
    }

    #[test]
    fn degree_and_simple_zeros() {
        let r = RationalPolynomialFL::from_factors(vec![(lf(1, 1), 1), (lf(0, 1), -1)]).unwrap();
        assert_eq!(r.degree(), 0);
        let r1 = RationalPolynomialFL::from_factors(vec![(lf(1, 0), 1), (lf(1, 2), 1), (lf(1, 1), -2)]).unwrap();
        assert!(r1.is_simple_zero(0, 1));
        let r = RationalPolynomialFL::from_factors(vec![(lf(1, 0), 2), (lf(0, 1), 1)]).unwrap();
        assert!(!r.is_simple_zero(0, 1));
    }

    #[test]
    fn power_form() {
        let r = RationalPolynomialFL::from_factors(vec![(lf(1, 1), 2), (lf(1, 2), 2)]).unwrap();
        assert_eq!(r.power_form_order(None).unwrap(), 2);
        let r1 = RationalPolynomialFL::from_factors(vec![(lf(1, 0), 1), (lf(1, 2), 1), (lf(1, 1), -2)]).unwrap();
        assert_eq!(r1.power_form_order(Some((lf(0, 1), lf(1, 1)))).unwrap(), 1);
        let r = RationalPolynomialFL::from_factors(vec![(lf(1, 1), 3), (lf(1, 2), 6)]).unwrap();
        assert_eq!(r.power_form_order(None).unwrap(), 3);
        let r = RationalPolynomialFL::from_factors(vec![(lf(1, 1), 3)]).unwrap();
        assert_eq!(
            r.power_form_order(Some((lf(2, 2), lf(0, 1)))),
            Err(LinFormError::EmptyAfterExclusion)
        );
    }

    #[test]
    fn canonical_form_absorbs_content() {
        let r = RationalPolynomialFL::from_factors(vec![(lf(2, 4), 1), (lf(0, 3), -1)]).unwrap();
        assert_eq!(r.constant(), &BigRational::new(2.into(), 3.into()));
        assert_eq!(r.factors(), &[(lf(0, 1), -1), (lf(1, 2), 1)]);
        assert!(matches!(
            RationalPolynomialFL::from_factors(vec![(lf(1, -1), 1), (lf(-1, 1), 1)]),
            Err(LinFormError::Dependent(..))
        ));
    }

    #[test]
    fn substitution_examples() {
        let r = RationalPolynomialFL::from_factors(vec![(lf(1, -1), 1)]).unwrap();
        let s = r.substitute((1, 1, 0), (0, 1, 0)).unwrap();
        assert_eq!(s.factors(), &[(LinearForm::m(), 1)]);
        let r = RationalPolynomialFL::from_factors(vec![(lf(1, 1), 1), (lf(0, 1), -1)]).unwrap();
        let s = r.substitute((0, 1, 0), (1, 0, 0)).unwrap();
        assert_eq!(
            s,
            RationalPolynomialFL::from_factors(vec![(lf(1, 1), 1), (lf(1, 0), -1)]).unwrap()
        );
        assert!(matches!(
            r.substitute((1, 0, 1), (0, 1, 0)),
            Err(LinFormError::AffineSubstitution(1))
        ));
        let r = RationalPolynomialFL::from_factors(vec![(lf(1, -1), 1)]).unwrap();
        assert!(matches!(
            r.substitute((1, 0, 0), (1, 0, 0)),
            Err(LinFormError::DegenerateSubstitution(_))
        ));
    }

    #[test]
    fn grid_pull_back() {
        let g = Grid2D {
            a1: 6,
            b1: 1,
            a2: 6,
            b2: 0,
        };
        let f = lf(1, 2);
        let (x, y, z) = g.pull_back(&f);
        let (gm, gn) = g.point(3, 4);
        assert_eq!(x * 3 + y * 4 + z, f.alpha as i128 * gm + f.beta as i128 * gn);
    }
}
