use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use multact_core::actions::{
    character, ActionDesc, CompletelyAdditiveSequence, Observable, ObservableDesc, Permutation,
};
use multact_core::averages::{digit_density, digit_stream, omega_product_average};
use multact_core::uniformity::{
    gowers_norm, gowers_norm_recursive, gowers_u2_fft, inverse_diagnostic, mixed_seminorm, PeriodizedSequence,
};

use super::{forms, liouville_rotation, nonincreasing, strings};
use crate::error::{fail, LabError};
use crate::registry::{Ctx, Experiment};
use crate::report::{cplx, int, num, Report, Table};

pub struct GowersOracle;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GowersParams {
    pub sequences: usize,
    pub n_min: usize,
    pub n_max: usize,
    pub expanded_sizes: Vec<usize>,
    pub pairs: usize,
    pub pair_n_max: usize,
    pub s_max: u32,
    pub tolerance: f64,
}

impl Default for GowersParams {
    fn default() -> Self {
        Self {
            sequences: 100,
            n_min: 16,
            n_max: 1024,
            expanded_sizes: vec![4, 9, 16, 25, 32],
            pairs: 50,
            pair_n_max: 48,
            s_max: 4,
            tolerance: 1e-9,
        }
    }
}

fn random_sequence(rng: &mut ChaCha8Rng, n: usize) -> Result<PeriodizedSequence, LabError> {
    let v = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    Ok(PeriodizedSequence::new(v)?)
}

/// `‖a‖_{U³}` from the eightfold sum over `x, h₁, h₂, h₃`.
fn u3_expanded(a: &PeriodizedSequence) -> f64 {
    let n = a.len();
    let v = a.values();
    let mut total = Complex64::new(0.0, 0.0);
    for x in 0..n {
        for h1 in 0..n {
            for h2 in 0..n {
                for h3 in 0..n {
                    let mut prod = Complex64::new(1.0, 0.0);
                    for w in 0..8usize {
                        let (w1, w2, w3) = (w & 1, (w >> 1) & 1, (w >> 2) & 1);
                        let z = v[(x + w1 * h1 + w2 * h2 + w3 * h3) % n];
                        prod *= if (w1 + w2 + w3) % 2 == 1 { z.conj() } else { z };
                    }
                    total += prod;
                }
            }
        }
    }
    (total.re / (n as f64).powi(4)).max(0.0).powf(1.0 / 8.0)
}

impl Experiment for GowersOracle {
    type Params = GowersParams;
    const NAME: &'static str = "gowers-oracle";
    const ABOUT: &'static str = "Gowers norms by FFT, by recursion and by direct expansion on random sequences";

    fn run(p: &GowersParams, ctx: &Ctx) -> Result<Report, LabError> {
        if p.n_min == 0 || p.n_min > p.n_max || p.pair_n_max == 0 {
            return Err(fail("need 1 ≤ n_min ≤ n_max and pair_n_max ≥ 1"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        let mut t = Table::new(&["check", "n", "s", "lhs", "rhs", "gap"]);
        let (mut fft_gap, mut exp_gap, mut tri_gap, mut mono_gap) =
            (0.0f64, 0.0f64, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for _ in 0..p.sequences {
            let n = rng.gen_range(p.n_min..=p.n_max);
            let a = random_sequence(&mut rng, n)?;
            let (x, y) = (gowers_u2_fft(&a), gowers_norm_recursive(&a, 2)?);
            fft_gap = fft_gap.max((x - y).abs());
            t.push(vec![
                "u2-fft-vs-recursive".into(),
                int(n),
                "2".into(),
                num(x),
                num(y),
                num((x - y).abs()),
            ]);
        }
        for &n in &p.expanded_sizes {
            let a = random_sequence(&mut rng, n)?;
            let (x, y) = (gowers_norm_recursive(&a, 3)?, u3_expanded(&a));
            exp_gap = exp_gap.max((x - y).abs());
            t.push(vec![
                "u3-recursive-vs-expanded".into(),
                int(n),
                "3".into(),
                num(x),
                num(y),
                num((x - y).abs()),
            ]);
        }
        for _ in 0..p.pairs {
            let n = rng.gen_range(1..=p.pair_n_max);
            let a = random_sequence(&mut rng, n)?;
            let b = random_sequence(&mut rng, n)?;
            let sum = a.add(&b)?;
            let mut prev = None;
            for s in 1..=p.s_max {
                let lhs = gowers_norm(&sum, s)?;
                let rhs = gowers_norm(&a, s)? + gowers_norm(&b, s)?;
                tri_gap = tri_gap.max(lhs - rhs);
                t.push(vec![
                    "triangle".into(),
                    int(n),
                    int(s),
                    num(lhs),
                    num(rhs),
                    num(lhs - rhs),
                ]);
                let cur = gowers_norm(&a, s)?;
                if let Some(pr) = prev {
                    mono_gap = mono_gap.max(pr - cur);
                    t.push(vec![
                        "monotone".into(),
                        int(n),
                        int(s),
                        num(pr),
                        num(cur),
                        num(pr - cur),
                    ]);
                }
                prev = Some(cur);
            }
        }
        let mut r = Report::new(t);
        r.metric("u2_fft_gap", fft_gap);
        r.metric("u3_expanded_gap", exp_gap);
        r.check("u2-fft-matches-recursion", fft_gap <= p.tolerance);
        r.check("u3-recursion-matches-expansion", exp_gap <= p.tolerance);
        if p.pairs > 0 {
            r.metric("triangle_excess", tri_gap);
            r.check("triangle-inequality", tri_gap <= p.tolerance);
            if p.s_max > 1 {
                r.metric("monotonicity_excess", mono_gap);
                r.check("monotone-in-s", mono_gap <= p.tolerance);
            }
        }
        Ok(r)
    }
}

pub struct MixedSeminormLadder;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SeminormParams {
    pub action: ActionDesc,
    pub observable: ObservableDesc,
    pub s: u32,
    pub n_values: Vec<usize>,
}

impl Default for SeminormParams {
    fn default() -> Self {
        Self {
            action: liouville_rotation(),
            observable: ObservableDesc::Identity,
            s: 2,
            n_values: vec![100, 1000, 10_000],
        }
    }
}

impl Experiment for MixedSeminormLadder {
    type Params = SeminormParams;
    const NAME: &'static str = "mixed-seminorm-ladder";
    const ABOUT: &'static str = "Gowers-type seminorm of n ↦ F(T_n x) across a ladder of N";

    fn run(p: &SeminormParams, _: &Ctx) -> Result<Report, LabError> {
        let act = p.action.build()?;
        let f = p.observable.build(&act)?;
        let mut t = Table::new(&["n", "s", "seminorm"]);
        let mut vals = Vec::new();
        for &n in &p.n_values {
            let v = mixed_seminorm(&act, &f, p.s, n)?;
            vals.push(v);
            t.push(vec![int(n), int(p.s), num(v)]);
        }
        let mut r = Report::new(t);
        if let Some(v) = vals.last() {
            r.metric("final", *v);
        }
        r.check("nonincreasing", nonincreasing(&vals, 1e-12));
        Ok(r)
    }
}

pub struct InverseDiagnostic;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InverseParams {
    pub action: ActionDesc,
    pub observable: ObservableDesc,
    pub qr_grid: Vec<(u64, i64)>,
    pub n_values: Vec<usize>,
    pub s_max: u32,
}

impl Default for InverseParams {
    fn default() -> Self {
        Self {
            action: liouville_rotation(),
            observable: ObservableDesc::Identity,
            qr_grid: vec![(1, 0), (2, 1), (3, 1), (3, 2), (6, 1)],
            n_values: vec![100, 1000, 10_000],
            s_max: 2,
        }
    }
}

impl Experiment for InverseDiagnostic {
    type Params = InverseParams;
    const NAME: &'static str = "inverse-diagnostic";
    const ABOUT: &'static str = "largest progression average next to the mixed seminorms, per N";

    fn run(p: &InverseParams, _: &Ctx) -> Result<Report, LabError> {
        let act = p.action.build()?;
        let f = p.observable.build(&act)?;
        let grid: Vec<(u128, i128)> = p.qr_grid.iter().map(|&(q, r)| (q as u128, r as i128)).collect();
        let rows = inverse_diagnostic(&act, &f, &grid, &p.n_values, p.s_max)?;
        let mut header = vec![
            "n".to_string(),
            "max_progression_norm".into(),
            "argmax_q".into(),
            "argmax_r".into(),
        ];
        header.extend((1..=p.s_max).map(|s| format!("seminorm_s{s}")));
        let mut t = Table {
            header,
            rows: Vec::new(),
        };
        for row in &rows {
            let mut v = vec![
                int(row.n),
                num(row.max_progression_norm),
                int(row.argmax.0),
                int(row.argmax.1),
            ];
            v.extend(row.seminorms.iter().map(|x| num(*x)));
            t.push(v);
        }
        let mut r = Report::new(t);
        if let Some(last) = rows.last() {
            r.metric("final_max_progression_norm", last.max_progression_norm);
            for (s, v) in last.seminorms.iter().enumerate() {
                r.metric(&format!("final_seminorm_s{}", s + 1), *v);
            }
        }
        Ok(r)
    }
}

pub struct OmegaUniformity;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OmegaParams {
    /// Cycle lengths; each factor is `x ↦ x + Ω(n)` on `Z_d`.
    pub cycles: Vec<usize>,
    /// The observable on factor `j` is `x ↦ e(k_j x / d_j)`.
    pub characters: Vec<i64>,
    pub forms: Vec<String>,
    pub n: usize,
    pub tolerance: f64,
}

impl Default for OmegaParams {
    fn default() -> Self {
        Self {
            cycles: vec![3, 4],
            characters: vec![1, 1],
            forms: strings(&["m + n", "m + 2n"]),
            n: 2000,
            tolerance: 0.05,
        }
    }
}

impl Experiment for OmegaUniformity {
    type Params = OmegaParams;
    const NAME: &'static str = "omega-uniformity";
    const ABOUT: &'static str = "product averages of F_j(T^{Ω(L_j(m,n))} x_j) over cyclic shifts";

    fn run(p: &OmegaParams, _: &Ctx) -> Result<Report, LabError> {
        if p.cycles.len() != p.characters.len() {
            return Err(LabError::Schema("cycles and characters differ in length".into()));
        }
        let fs = forms(&p.forms)?;
        let perms: Vec<Permutation> = p.cycles.iter().map(|&d| Permutation::shift(d, 1)).collect();
        let seqs = vec![CompletelyAdditiveSequence::omega(); p.cycles.len()];
        let obs: Vec<Observable> = p
            .cycles
            .iter()
            .zip(&p.characters)
            .map(|(&d, &k)| character(d, k))
            .collect();
        let avg = omega_product_average(&perms, &seqs, &obs, &fs, p.n)?;
        let mut t = Table::new(&["x", "re", "im"]);
        for (x, z) in avg.value.as_vector().unwrap_or(&[]).iter().enumerate() {
            let [re, im] = cplx(*z);
            t.push(vec![int(x), re, im]);
        }
        let prod: Complex64 = obs.iter().map(|o| o.integral()).product();
        let size = avg.value.len();
        let gap = avg.value.distance(&Observable::constant(size, prod))?;
        let mut r = Report::new(t);
        r.count("omega_product_average", avg.contributing, avg.excluded);
        r.metric("integral_abs", avg.integral().norm());
        r.metric("l2_gap_to_product", gap);
        r.check("integral-small", (avg.integral() - prod).norm() <= p.tolerance);
        Ok(r)
    }
}

pub struct Digits;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DigitsParams {
    pub bases: Vec<u8>,
    pub targets: Vec<u8>,
    pub forms: Vec<String>,
    /// Digits drawn per stream; stream `j` uses the run seed and stream id `j`.
    pub stream_len: usize,
    pub n: usize,
    pub relative_tolerance: f64,
}

impl Default for DigitsParams {
    fn default() -> Self {
        Self {
            bases: vec![2, 3],
            targets: vec![0, 0],
            forms: strings(&["m + n", "m + 2n"]),
            stream_len: 64,
            n: 2000,
            relative_tolerance: 0.1,
        }
    }
}

impl Experiment for Digits {
    type Params = DigitsParams;
    const NAME: &'static str = "digits";
    const ABOUT: &'static str = "frequency of prescribed digits d_j(Ω(L_j(m,n))) against ∏ 1/b_j";

    fn run(p: &DigitsParams, ctx: &Ctx) -> Result<Report, LabError> {
        let fs = forms(&p.forms)?;
        let streams: Vec<Vec<u8>> = p
            .bases
            .iter()
            .enumerate()
            .map(|(j, &b)| digit_stream(b, p.stream_len, ctx.seed, j as u64))
            .collect();
        let seqs = vec![CompletelyAdditiveSequence::omega(); p.bases.len()];
        let d = digit_density(&p.bases, &p.targets, &seqs, &fs, &streams, p.n)?;
        let expected: f64 = p.bases.iter().map(|&b| 1.0 / b as f64).product();
        let rel = (d.frequency / expected - 1.0).abs();
        let mut t = Table::new(&[
            "n",
            "hits",
            "contributing",
            "excluded",
            "frequency",
            "expected",
            "relative_error",
        ]);
        t.push(vec![
            int(p.n),
            int(d.hits),
            int(d.contributing),
            int(d.excluded),
            num(d.frequency),
            num(expected),
            num(rel),
        ]);
        let mut r = Report::new(t);
        r.count("digit_density", d.contributing, d.excluded);
        r.metric("frequency", d.frequency);
        r.metric("relative_error", rel);
        r.check("within-relative-tolerance", rel <= p.relative_tolerance);
        Ok(r)
    }
}
