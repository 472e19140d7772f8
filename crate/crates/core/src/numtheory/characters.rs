use num_complex::Complex64;
use num_integer::Integer;

use super::factor::factorize;

/// `e(k/d) = exp(2πi k/d)`, exact at quarter turns.
pub fn root_of_unity(k: i64, d: u64) -> Complex64 {
    let d = d as i64;
    let k = k.rem_euclid(d);
    let g = k.gcd(&d).max(1);
    let (k, d) = (k / g, d / g);
    match (k, d) {
        (0, _) => Complex64::new(1.0, 0.0),
        (1, 2) => Complex64::new(-1.0, 0.0),
        (1, 4) => Complex64::new(0.0, 1.0),
        (3, 4) => Complex64::new(0.0, -1.0),
        _ => Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / d as f64),
    }
}

/// One Dirichlet character mod `q`, tabulated on residues.
///
/// Values are stored both as complex numbers and as exponents `k` with
/// `χ(n) = e(k / exponent)`; `None` marks residues sharing a factor with `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletCharacterTable {
    modulus: u64,
    index: usize,
    exponent: u64,
    exps: Vec<Option<u64>>,
    values: Vec<Complex64>,
}

impl DirichletCharacterTable {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Position in the list returned by [`dirichlet_characters`].
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn is_principal(&self) -> bool {
        self.index == 0
    }

    #[inline]
    pub fn value(&self, n: u128) -> Complex64 {
        self.values[(n % self.modulus as u128) as usize]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `χ(n) = e(k/d)` as `(k, d)`, or `None` when `gcd(n, q) > 1`.
    pub fn phase(&self, n: u128) -> Option<(u64, u64)> {
        self.exps[(n % self.modulus as u128) as usize].map(|k| (k, self.exponent))
    }

    /// Multiplicative order of the character.
    pub fn order(&self) -> u64 {
        let g = self.exps.iter().flatten().fold(self.exponent, |g, &k| g.gcd(&k));
        self.exponent / g.max(1)
    }

    pub fn is_real(&self) -> bool {
        self.order() <= 2
    }
}

struct Component {
    modulus: u64,
    order: u64,
    dlog: Vec<u64>,
}

fn cyclic_component(modulus: u64, generator: u64, order: u64) -> Component {
    let mut dlog = vec![0u64; modulus as usize];
    let mut x = 1u64;
    for k in 0..order {
        dlog[x as usize] = k;
        x = x * generator % modulus;
    }
    Component { modulus, order, dlog }
}

fn primitive_root_prime_power(p: u64, e: u32) -> u64 {
    let phi_p = p - 1;
    let fac = factorize(phi_p as u128, None).expect("p - 1 >= 1");
    let is_root_mod_p = |g: u64| {
        fac.factors()
            .iter()
            .all(|&(r, _)| super::primality::pow_mod(g as u128, (phi_p / r as u64) as u128, p as u128) != 1)
    };
    let g = (2..p).find(|&g| is_root_mod_p(g)).unwrap_or(1);
    if e == 1 {
        return g;
    }
    let p2 = (p * p) as u128;
    if super::primality::pow_mod(g as u128, phi_p as u128, p2) == 1 {
        g + p
    } else {
        g
    }
}

type Reduction = Box<dyn Fn(u64) -> u64>;

/// All `φ(q)` characters mod `q`, principal first.
///
/// The unit group is split into cyclic factors via CRT (odd prime powers are
/// cyclic; `2^e`, `e ≥ 3`, is `⟨−1⟩ × ⟨5⟩`); characters are enumerated in
/// mixed radix over the factor orders.
pub fn dirichlet_characters(q: u64) -> Vec<DirichletCharacterTable> {
    assert!(q >= 1, "modulus must be positive");
    let fac = factorize(q as u128, None).expect("q >= 1");
    // Each entry: (component, how to reduce a unit mod q into the component).
    let mut comps: Vec<(Component, Reduction)> = Vec::new();
    for &(p, e) in fac.factors() {
        let p = p as u64;
        let pe = p.pow(e);
        if p == 2 {
            if e == 2 {
                comps.push((cyclic_component(4, 3, 2), Box::new(move |n| n % 4)));
            } else if e >= 3 {
                let sign = Component {
                    modulus: 4,
                    order: 2,
                    dlog: vec![0, 0, 0, 1],
                };
                comps.push((sign, Box::new(move |n| n % 4)));
                let five = cyclic_component(pe, 5, pe / 4);
                comps.push((
                    five,
                    Box::new(move |n| {
                        let r = n % pe;
                        if r % 4 == 1 {
                            r
                        } else {
                            pe - r
                        }
                    }),
                ));
            }
        } else {
            let g = primitive_root_prime_power(p, e);
            comps.push((cyclic_component(pe, g, pe / p * (p - 1)), Box::new(move |n| n % pe)));
        }
    }

    let exponent = comps.iter().fold(1u64, |l, (c, _)| l.lcm(&c.order));
    let count: u64 = comps.iter().map(|(c, _)| c.order).product();

    // Coordinates of each residue (None if not a unit).
    let coords: Vec<Option<Vec<u64>>> = (0..q)
        .map(|n| {
            if n.gcd(&q) != 1 {
                return None;
            }
            Some(
                comps
                    .iter()
                    .map(|(c, reduce)| c.dlog[reduce(n) as usize % c.modulus as usize])
                    .collect(),
            )
        })
        .collect();

    (0..count)
        .map(|index| {
            let mut rem = index;
            let digits: Vec<u64> = comps
                .iter()
                .map(|(c, _)| {
                    let d = rem % c.order;
                    rem /= c.order;
                    d
                })
                .collect();
            let exps: Vec<Option<u64>> = coords
                .iter()
                .map(|co| {
                    co.as_ref().map(|co| {
                        comps
                            .iter()
                            .zip(&digits)
                            .zip(co)
                            .map(|(((c, _), &j), &x)| j * x % c.order * (exponent / c.order))
                            .sum::<u64>()
                            % exponent
                    })
                })
                .collect();
            let values = exps
                .iter()
                .map(|k| match k {
                    Some(k) => root_of_unity(*k as i64, exponent),
                    None => Complex64::new(0.0, 0.0),
                })
                .collect();
            DirichletCharacterTable {
                modulus: q,
                index: index as usize,
                exponent,
                exps,
                values,
            }
        })
        .collect()
}

/// Euler's totient.
pub fn euler_phi(q: u64) -> u64 {
    let fac = factorize(q as u128, None).expect("q >= 1");
    fac.factors()
        .iter()
        .fold(q, |acc, &(p, _)| acc / p as u64 * (p as u64 - 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12
    }

    #[test]
    fn modulus_three() {
        let chars = dirichlet_characters(3);
        assert_eq!(chars.len(), 2);
        assert!(chars[0].is_principal());
        assert_eq!(chars[1].value(2), Complex64::new(-1.0, 0.0));
        assert_eq!(chars[1].value(3), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn modulus_one() {
        let chars = dirichlet_characters(1);
        assert_eq!(chars.len(), 1);
        assert_eq!(chars[0].value(17), Complex64::new(1.0, 0.0));
    }

    /// Enumerates homomorphisms (Z/8)^* → {±1, ±i} by brute force.
    #[test]
    fn modulus_eight_matches_brute_force() {
        let units = [1u64, 3, 5, 7];
        let targets = [
            Complex64::new(1.0, 0.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(0.0, -1.0),
        ];
        let mut homs: Vec<[Complex64; 4]> = Vec::new();
        for a in targets {
            for b in targets {
                for c in targets {
                    for d in targets {
                        let v = [a, b, c, d];
                        let ok = units.iter().enumerate().all(|(i, &x)| {
                            units.iter().enumerate().all(|(j, &y)| {
                                let k = units.iter().position(|&u| u == x * y % 8).unwrap();
                                close(v[i] * v[j], v[k])
                            })
                        });
                        if ok {
                            homs.push(v);
                        }
                    }
                }
            }
        }
        assert_eq!(homs.len(), 4);
        let chars = dirichlet_characters(8);
        assert_eq!(chars.len(), 4);
        for ch in &chars {
            assert!(ch.is_real());
            let v = [ch.value(1), ch.value(3), ch.value(5), ch.value(7)];
            assert!(homs.iter().any(|h| h.iter().zip(&v).all(|(a, b)| close(*a, *b))));
        }
    }

    #[test]
    fn orthogonality_and_multiplicativity() {
        for q in 1..=60u64 {
            let chars = dirichlet_characters(q);
            let phi = euler_phi(q);
            assert_eq!(chars.len() as u64, phi, "q = {q}");
            for (i, a) in chars.iter().enumerate() {
                for m in 0..q {
                    for n in 0..q {
                        assert!(close(a.value((m * n) as u128), a.value(m as u128) * a.value(n as u128)));
                    }
                }
                for (j, b) in chars.iter().enumerate() {
                    let s: Complex64 = (0..q).map(|n| a.value(n as u128) * b.value(n as u128).conj()).sum();
                    let want = if i == j { phi as f64 } else { 0.0 };
                    assert!((s - Complex64::new(want, 0.0)).norm() < 1e-9, "q={q} i={i} j={j}");
                }
            }
        }
    }
}
