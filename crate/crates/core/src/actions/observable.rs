use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ActionError;
use crate::sum::{ComplexSum, Neumaier};

/// A square-integrable function on the state space.
///
/// `Vector` lives on a finite space with the uniform measure. `Fourier` is a
/// finite sum `Σ c_k e_k` of orthonormal characters `e_k` on the circle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observable {
    Vector(Vec<Complex64>),
    Fourier(BTreeMap<i64, Complex64>),
}

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

impl Observable {
    pub fn constant(size: usize, c: Complex64) -> Self {
        Observable::Vector(vec![c; size])
    }

    pub fn from_real(values: impl IntoIterator<Item = f64>) -> Self {
        Observable::Vector(values.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    pub fn indicator(size: usize, mut member: impl FnMut(usize) -> bool) -> Self {
        Self::from_real((0..size).map(|x| if member(x) { 1.0 } else { 0.0 }))
    }

    /// The character `e_k`.
    pub fn basis(k: i64) -> Self {
        Observable::Fourier(BTreeMap::from([(k, Complex64::new(1.0, 0.0))]))
    }

    pub fn as_vector(&self) -> Option<&[Complex64]> {
        match self {
            Observable::Vector(v) => Some(v),
            Observable::Fourier(_) => None,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Observable::Vector(v) => v.len(),
            Observable::Fourier(c) => c.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn integral(&self) -> Complex64 {
        match self {
            Observable::Vector(v) if v.is_empty() => zero(),
            Observable::Vector(v) => v.iter().copied().collect::<ComplexSum>().value() / v.len() as f64,
            Observable::Fourier(c) => c.get(&0).copied().unwrap_or_default(),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        match self {
            Observable::Vector(v) => crate::sum::l2_norm(v),
            Observable::Fourier(c) => c.values().map(|z| z.norm_sqr()).collect::<Neumaier>().value().sqrt(),
        }
    }

    /// `sup |F|`; for Fourier sums this is the bound `Σ |c_k|`.
    pub fn sup_norm(&self) -> f64 {
        match self {
            Observable::Vector(v) => v.iter().map(|z| z.norm()).fold(0.0, f64::max),
            Observable::Fourier(c) => c.values().map(|z| z.norm()).sum(),
        }
    }

    pub fn is_indicator(&self) -> bool {
        matches!(self, Observable::Vector(v) if v.iter().all(|z| z.im == 0.0 && (z.re == 0.0 || z.re == 1.0)))
    }

    fn zip(&self, other: &Observable, what: &'static str) -> Result<(), ActionError> {
        match (self, other) {
            (Observable::Vector(a), Observable::Vector(b)) if a.len() != b.len() => Err(ActionError::SpaceMismatch {
                left: a.len(),
                right: b.len(),
            }),
            (Observable::Vector(_), Observable::Vector(_)) | (Observable::Fourier(_), Observable::Fourier(_)) => Ok(()),
            _ => Err(ActionError::KindMismatch(what)),
        }
    }

    /// `∫ F·conj(G) dμ`.
    pub fn inner(&self, other: &Observable) -> Result<Complex64, ActionError> {
        self.zip(other, "inner product")?;
        Ok(match (self, other) {
            (Observable::Vector(a), Observable::Vector(b)) => {
                if a.is_empty() {
                    return Ok(zero());
                }
                a.iter()
                    .zip(b)
                    .map(|(x, y)| x * y.conj())
                    .collect::<ComplexSum>()
                    .value()
                    / a.len() as f64
            }
            (Observable::Fourier(a), Observable::Fourier(b)) => a
                .iter()
                .filter_map(|(k, x)| b.get(k).map(|y| x * y.conj()))
                .collect::<ComplexSum>()
                .value(),
            _ => unreachable!(),
        })
    }

    pub fn add(&self, other: &Observable) -> Result<Observable, ActionError> {
        self.combine(other, 1.0)
    }

    pub fn sub(&self, other: &Observable) -> Result<Observable, ActionError> {
        self.combine(other, -1.0)
    }

    fn combine(&self, other: &Observable, sign: f64) -> Result<Observable, ActionError> {
        self.zip(other, "sum")?;
        Ok(match (self, other) {
            (Observable::Vector(a), Observable::Vector(b)) => {
                Observable::Vector(a.iter().zip(b).map(|(x, y)| x + y * sign).collect())
            }
            (Observable::Fourier(a), Observable::Fourier(b)) => {
                let mut out = a.clone();
                for (k, y) in b {
                    *out.entry(*k).or_default() += y * sign;
                }
                Observable::Fourier(out)
            }
            _ => unreachable!(),
        })
    }

    pub fn scale(&self, c: Complex64) -> Observable {
        match self {
            Observable::Vector(a) => Observable::Vector(a.iter().map(|x| x * c).collect()),
            Observable::Fourier(a) => Observable::Fourier(a.iter().map(|(k, x)| (*k, x * c)).collect()),
        }
    }

    pub fn conj(&self) -> Observable {
        match self {
            Observable::Vector(a) => Observable::Vector(a.iter().map(|x| x.conj()).collect()),
            Observable::Fourier(a) => Observable::Fourier(a.iter().map(|(k, x)| (-k, x.conj())).collect()),
        }
    }

    /// Pointwise product (convolution of coefficients for Fourier sums).
    pub fn mul(&self, other: &Observable) -> Result<Observable, ActionError> {
        self.zip(other, "product")?;
        Ok(match (self, other) {
            (Observable::Vector(a), Observable::Vector(b)) => {
                Observable::Vector(a.iter().zip(b).map(|(x, y)| x * y).collect())
            }
            (Observable::Fourier(a), Observable::Fourier(b)) => {
                let mut out: BTreeMap<i64, Complex64> = BTreeMap::new();
                for (j, x) in a {
                    for (k, y) in b {
                        *out.entry(j + k).or_default() += x * y;
                    }
                }
                Observable::Fourier(out)
            }
            _ => unreachable!(),
        })
    }

    /// `‖F - G‖_{L²}`.
    pub fn distance(&self, other: &Observable) -> Result<f64, ActionError> {
        Ok(self.sub(other)?.l2_norm())
    }
}
