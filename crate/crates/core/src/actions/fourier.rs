use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{ActionError, Observable};
use crate::multfn::{MultiplicativeFunction, MultiplicativeFunctionSpec};

/// `T_n e_k = f(n)^k e_k` on finite Fourier sums, `f` unimodular.
#[derive(Clone, Debug)]
pub struct FourierRotationAction {
    f: MultiplicativeFunction,
}

impl FourierRotationAction {
    pub fn new(spec: &MultiplicativeFunctionSpec) -> Result<Self, ActionError> {
        let f = spec.compile()?;
        if !f.is_unimodular() {
            return Err(ActionError::NotARotation("f is not unimodular".into()));
        }
        Ok(Self { f })
    }

    pub fn function(&self) -> &MultiplicativeFunction {
        &self.f
    }

    /// `f(m/n)`.
    pub fn value(&self, m: u128, n: u128) -> Result<Complex64, ActionError> {
        Ok(self.f.eval_rational(m, n)?)
    }

    /// `F ∘ T` where `T` multiplies `e_k` by `z^k`.
    pub fn apply_value(&self, z: Complex64, f: &BTreeMap<i64, Complex64>) -> Observable {
        Observable::Fourier(f.iter().map(|(&k, c)| (k, c * z.powi(k as i32))).collect())
    }
}
