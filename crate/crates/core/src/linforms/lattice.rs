use std::collections::BTreeSet;

use num_complex::Complex64;

use super::LinFormError;
use crate::numtheory::root_of_unity;

/// Both sides of the identity `1_{A·Z²}(m, n) = E_{q ∈ Z_A} e(m q₁ + n q₂)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LatticeCheck {
    pub indicator: u8,
    pub exponential_sum: Complex64,
    pub z_a_size: usize,
}

impl LatticeCheck {
    pub fn agrees(&self, tol: f64) -> bool {
        (self.exponential_sum - Complex64::new(self.indicator as f64, 0.0)).norm() <= tol
    }
}

fn det(a: &[[i64; 2]; 2]) -> i64 {
    a[0][0] * a[1][1] - a[0][1] * a[1][0]
}

/// `Z_A = {q ∈ [0,1)² : q·A ∈ Z²}` as numerator pairs over `|det A|`.
pub fn z_a(a: &[[i64; 2]; 2]) -> Result<Vec<(i64, i64)>, LinFormError> {
    let d = det(a);
    if d == 0 {
        return Err(LinFormError::SingularMatrix);
    }
    let ad = d.abs();
    let s = d.signum();
    // q = u·adj(A)/det for integer row vectors u.
    let adj = [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]];
    let mut set = BTreeSet::new();
    for u1 in 0..ad {
        for u2 in 0..ad {
            let q1 = (u1 * adj[0][0] + u2 * adj[1][0]) * s;
            let q2 = (u1 * adj[0][1] + u2 * adj[1][1]) * s;
            set.insert((q1.rem_euclid(ad), q2.rem_euclid(ad)));
        }
    }
    Ok(set.into_iter().collect())
}

pub fn lattice_indicator_check(a: &[[i64; 2]; 2], m: i64, n: i64) -> Result<LatticeCheck, LinFormError> {
    let zs = z_a(a)?;
    let d = det(a);
    let ad = d.abs();
    // A⁻¹(m, n)ᵀ ∈ Z² iff adj(A)(m, n)ᵀ ≡ 0 mod det.
    let x = a[1][1] as i128 * m as i128 - a[0][1] as i128 * n as i128;
    let y = -(a[1][0] as i128) * m as i128 + a[0][0] as i128 * n as i128;
    let indicator = (x % ad as i128 == 0 && y % ad as i128 == 0) as u8;
    let mut sum = Complex64::new(0.0, 0.0);
    for &(q1, q2) in &zs {
        let k = (m as i128 * q1 as i128 + n as i128 * q2 as i128).rem_euclid(ad as i128) as i64;
        sum += root_of_unity(k, ad as u64);
    }
    Ok(LatticeCheck {
        indicator,
        exponential_sum: sum / zs.len() as f64,
        z_a_size: zs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_matrix() {
        let a = [[1, 0], [0, 1]];
        assert_eq!(z_a(&a).unwrap(), vec![(0, 0)]);
        for (m, n) in [(0, 0), (3, -7), (10, 11)] {
            let c = lattice_indicator_check(&a, m, n).unwrap();
            assert_eq!(c.indicator, 1);
            assert!(c.agrees(1e-12));
        }
    }

    #[test]
    fn diagonal_matrix() {
        let a = [[2, 0], [0, 3]];
        let c = lattice_indicator_check(&a, 2, 3).unwrap();
        assert_eq!(c.indicator, 1);
        assert!(c.agrees(1e-12));
        let c = lattice_indicator_check(&a, 1, 3).unwrap();
        assert_eq!(c.indicator, 0);
        assert!(c.agrees(1e-12));
        assert_eq!(c.z_a_size, 6);
    }

    #[test]
    fn singular() {
        assert_eq!(z_a(&[[1, 2], [2, 4]]), Err(LinFormError::SingularMatrix));
    }

    #[test]
    fn shear_agrees_everywhere() {
        let a = [[2, 1], [-1, 3]];
        for m in -10..10 {
            for n in -10..10 {
                let c = lattice_indicator_check(&a, m, n).unwrap();
                assert_eq!(c.z_a_size, 7);
                assert!(c.agrees(1e-12), "{m} {n}");
            }
        }
    }
}
