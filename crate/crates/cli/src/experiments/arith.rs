use serde::{Deserialize, Serialize};

use multact_core::folner::{phi_k, s_k_density};
use multact_core::multfn::{progression_mean, MultiplicativeFunctionSpec as S};
use multact_core::uniformity::{katai_correlation, SquareArray};

use super::nonincreasing;
use crate::error::{fail, LabError};
use crate::registry::{Ctx, Experiment};
use crate::report::{int, num, Report, Table};

pub struct FolnerDensity;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FolnerParams {
    pub k_values: Vec<u32>,
}

impl Default for FolnerParams {
    fn default() -> Self {
        Self { k_values: vec![2, 3] }
    }
}

impl Experiment for FolnerDensity {
    type Params = FolnerParams;
    const NAME: &'static str = "folner-density";
    const ABOUT: &'static str = "exact density of S_K in [Q_K] against the closed-form product, and |Φ_K|";

    fn run(p: &FolnerParams, _: &Ctx) -> Result<Report, LabError> {
        let mut t = Table::new(&[
            "k",
            "s_k",
            "q_k",
            "density",
            "closed_form",
            "phi_k_size",
            "phi_k_min",
            "phi_k_max",
        ]);
        let mut exact = true;
        for &k in &p.k_values {
            let d = s_k_density(k)?;
            let phi = phi_k(k)?;
            let min = phi.iter().map(|e| &e.value).min().ok_or_else(|| fail("Φ_K is empty"))?;
            let max = phi.iter().map(|e| &e.value).max().unwrap();
            exact &= d.ratio() == d.closed_form;
            t.push(vec![
                int(k),
                int(d.count),
                int(d.total),
                d.ratio().to_string(),
                d.closed_form.to_string(),
                int(phi.len()),
                min.to_string(),
                max.to_string(),
            ]);
        }
        let mut r = Report::new(t);
        r.check("density-equals-closed-form", exact);
        Ok(r)
    }
}

pub struct AperiodicityLiouville;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AperiodicityParams {
    pub function: S,
    pub a_max: u64,
    pub b_max: i64,
    pub n_values: Vec<usize>,
    pub tolerance: f64,
}

impl Default for AperiodicityParams {
    fn default() -> Self {
        Self {
            function: S::Liouville,
            a_max: 5,
            b_max: 5,
            n_values: vec![10_000, 100_000, 1_000_000],
            tolerance: 0.01,
        }
    }
}

impl Experiment for AperiodicityLiouville {
    type Params = AperiodicityParams;
    const NAME: &'static str = "aperiodicity-liouville";
    const ABOUT: &'static str = "max over a, b of |E_{n≤N} f(an+b)| across a ladder of N";

    fn run(p: &AperiodicityParams, _: &Ctx) -> Result<Report, LabError> {
        if p.n_values.is_empty() || p.a_max == 0 || p.b_max < 0 {
            return Err(fail("need a nonempty N ladder, a_max ≥ 1 and b_max ≥ 0"));
        }
        let f = p.function.compile()?;
        let mut t = Table::new(&["n", "a", "b", "mean_re", "mean_im", "abs"]);
        let mut maxima = Vec::new();
        for &n in &p.n_values {
            let mut worst = 0.0f64;
            for a in 1..=p.a_max as u128 {
                for b in 0..=p.b_max as i128 {
                    let m = progression_mean(&f, a, b, n)?;
                    worst = worst.max(m.value.norm());
                    t.push(vec![
                        int(n),
                        int(a),
                        int(b),
                        num(m.value.re),
                        num(m.value.im),
                        num(m.value.norm()),
                    ]);
                }
            }
            maxima.push(worst);
        }
        let mut r = Report::new(t);
        for (n, m) in p.n_values.iter().zip(&maxima) {
            r.metric(&format!("max_abs_n{n}"), *m);
        }
        r.check("decreasing", nonincreasing(&maxima, 0.0));
        r.check("final-within-tolerance", *maxima.last().unwrap() <= p.tolerance);
        Ok(r)
    }
}

pub struct KataiDiagnostic;

/// `A(m, n)` on `[N]²`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ArrayDesc {
    /// `f(m)·g(n)`.
    Product { f: S, g: S },
    /// `f(m + n)`.
    Sum { f: S },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KataiParams {
    pub array: ArrayDesc,
    pub n: usize,
    /// `(p, q, p', q')`, all prime with `pq' ≠ p'q`.
    pub quadruples: Vec<[u64; 4]>,
}

impl Default for KataiParams {
    fn default() -> Self {
        Self {
            array: ArrayDesc::Sum { f: S::Liouville },
            n: 2000,
            quadruples: vec![[2, 3, 3, 2], [2, 3, 5, 7], [3, 5, 5, 3], [5, 7, 7, 11]],
        }
    }
}

impl Experiment for KataiDiagnostic {
    type Params = KataiParams;
    const NAME: &'static str = "katai-diagnostic";
    const ABOUT: &'static str = "bilinear prime-dilation correlations of a square array";

    fn run(p: &KataiParams, _: &Ctx) -> Result<Report, LabError> {
        if p.n == 0 {
            return Err(fail("n must be positive"));
        }
        let arr = match &p.array {
            ArrayDesc::Product { f, g } => {
                let fv = f.compile()?.progression_values(1, 0, p.n)?;
                let gv = g.compile()?.progression_values(1, 0, p.n)?;
                SquareArray::from_fn(p.n, |m, n| fv[m - 1] * gv[n - 1])?
            }
            ArrayDesc::Sum { f } => {
                let fv = f.compile()?.progression_values(1, 0, 2 * p.n)?;
                SquareArray::from_fn(p.n, |m, n| fv[m + n - 1])?
            }
        };
        let mut t = Table::new(&["p", "q", "p2", "q2", "re", "im", "abs"]);
        let mut worst = 0.0f64;
        for &[a, b, c, d] in &p.quadruples {
            let z = katai_correlation(&arr, (a, b, c, d))?;
            worst = worst.max(z.norm());
            t.push(vec![
                int(a),
                int(b),
                int(c),
                int(d),
                num(z.re),
                num(z.im),
                num(z.norm()),
            ]);
        }
        let mut r = Report::new(t);
        r.metric("max_abs", worst);
        Ok(r)
    }
}
