//! Compensated summation.

use num_complex::Complex64;

/// Neumaier's variant of Kahan summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &Neumaier) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Neumaier::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexSum {
    re: Neumaier,
    im: Neumaier,
}

impl ComplexSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn merge(&mut self, other: &ComplexSum) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }
}

impl FromIterator<Complex64> for ComplexSum {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        let mut s = ComplexSum::new();
        for z in iter {
            s.add(z);
        }
        s
    }
}

pub fn sum_f64(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().collect::<Neumaier>().value()
}

pub fn sum_complex(xs: impl IntoIterator<Item = Complex64>) -> Complex64 {
    xs.into_iter().collect::<ComplexSum>().value()
}

/// Sums per-chunk partial sums in chunk order.
pub fn merge_complex(parts: &[ComplexSum]) -> Complex64 {
    let mut total = ComplexSum::new();
    for p in parts {
        total.merge(p);
    }
    total.value()
}

/// L² norm of a vector under the uniform probability measure.
pub fn l2_norm(v: &[Complex64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    (sum_f64(v.iter().map(|z| z.norm_sqr())) / v.len() as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensates_cancellation() {
        let xs = [1.0, 1e100, 1.0, -1e100];
        assert_eq!(sum_f64(xs), 2.0);
    }

    #[test]
    fn complex_parts() {
        let z = sum_complex((0..10).map(|k| Complex64::new(k as f64, -(k as f64))));
        assert_eq!(z, Complex64::new(45.0, -45.0));
    }
}
