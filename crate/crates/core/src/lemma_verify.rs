//! Exhaustive numerical checks of the kernel lemmas, the integer inequalities
//! behind the monotonicity lemma, and the operator algebra.
//!
//! Each check compares `lhs <= rhs` (or `lhs == rhs`) case by case and keeps
//! every case whose slack exceeds the tolerance. Sweeps run in parallel over
//! `n`; reports are assembled in loop order, so they are identical from run to
//! run regardless of thread count.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{domain, Result};
use crate::functions::{abs_diff, get_function, max_scale_combine, scaled, REGISTRY_IDS};
use crate::kernel::{
    interval_index, log_basis_weight, lower_bar_admissible, m_factor, ratio_row,
    upper_bar_admissible, upper_bar_doubling_admissible, weight_decay_start, MTermKind,
};
use crate::operators::{eval_max_product, DEFAULT_TOL};

/// Pure kernel comparisons.
pub const KERNEL_TOL: f64 = 1e-12;
/// Comparisons between two operator evaluations.
pub const ALGEBRA_TOL: f64 = 1e-10;

/// Parameter tuple of a single checked case. Unused coordinates stay `None`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Case {
    pub n: u64,
    pub j: Option<u64>,
    pub k: Option<u64>,
    pub alpha: Option<u32>,
    pub x: Option<f64>,
    pub tag: Option<String>,
}

impl Case {
    pub fn new(n: u64) -> Self {
        Case {
            n,
            ..Default::default()
        }
    }

    pub fn point(n: u64, x: f64) -> Self {
        Case::new(n).x(x)
    }

    pub fn j(mut self, j: u64) -> Self {
        self.j = Some(j);
        self
    }

    pub fn k(mut self, k: u64) -> Self {
        self.k = Some(k);
        self
    }

    pub fn alpha(mut self, alpha: u32) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn x(mut self, x: f64) -> Self {
        self.x = Some(x);
        self
    }

    pub fn tag(mut self, tag: impl Into<String>) -> Self {
        self.tag = Some(tag.into());
        self
    }
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}", self.n)?;
        if let Some(j) = self.j {
            write!(f, " j={j}")?;
        }
        if let Some(k) = self.k {
            write!(f, " k={k}")?;
        }
        if let Some(a) = self.alpha {
            write!(f, " alpha={a}")?;
        }
        if let Some(x) = self.x {
            write!(f, " x={x}")?;
        }
        if let Some(t) = &self.tag {
            write!(f, " {t}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub case: Case,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ViolationReport {
    pub check_id: String,
    pub total_cases: u64,
    pub tolerance: f64,
    pub violations: Vec<Violation>,
    /// Largest slack seen; `-inf` when no case ran.
    pub max_slack: f64,
}

impl ViolationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    /// Concatenates sub-reports under one id; the tolerance is the largest.
    pub fn aggregate(check_id: &str, parts: &[ViolationReport]) -> ViolationReport {
        ViolationReport {
            check_id: check_id.to_string(),
            total_cases: parts.iter().map(|p| p.total_cases).sum(),
            tolerance: parts.iter().map(|p| p.tolerance).fold(0.0, f64::max),
            violations: parts.iter().flat_map(|p| p.violations.clone()).collect(),
            max_slack: parts
                .iter()
                .map(|p| p.max_slack)
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

/// Accumulates cases for one check.
#[derive(Clone, Debug)]
pub struct ReportBuilder {
    check_id: String,
    tolerance: f64,
    total: u64,
    violations: Vec<Violation>,
    max_slack: f64,
}

impl ReportBuilder {
    pub fn new(check_id: &str, tolerance: f64) -> Self {
        ReportBuilder {
            check_id: check_id.to_string(),
            tolerance,
            total: 0,
            violations: Vec::new(),
            max_slack: f64::NEG_INFINITY,
        }
    }

    /// Records one case with a precomputed slack. NaN slack counts as a violation.
    pub fn record(&mut self, case: impl FnOnce() -> Case, lhs: f64, rhs: f64, slack: f64) {
        self.total += 1;
        if slack.is_nan() {
            self.max_slack = f64::INFINITY;
        } else {
            self.max_slack = self.max_slack.max(slack);
        }
        if !(slack <= self.tolerance) {
            self.violations.push(Violation {
                case: case(),
                lhs,
                rhs,
                slack,
            });
        }
    }

    /// `lhs <= rhs`, slack `lhs - rhs`.
    pub fn check(&mut self, case: impl FnOnce() -> Case, lhs: f64, rhs: f64) {
        self.record(case, lhs, rhs, lhs - rhs);
    }

    /// `lhs <= rhs`, slack `(lhs - rhs) / max(1, |rhs|)`.
    pub fn check_scaled(&mut self, case: impl FnOnce() -> Case, lhs: f64, rhs: f64) {
        self.record(case, lhs, rhs, (lhs - rhs) / rhs.abs().max(1.0));
    }

    /// `lhs == rhs`, slack `|lhs - rhs| / max(|lhs|, |rhs|)` (zero when both are zero).
    pub fn check_close(&mut self, case: impl FnOnce() -> Case, lhs: f64, rhs: f64) {
        let scale = lhs.abs().max(rhs.abs());
        let slack = if lhs == rhs {
            0.0
        } else {
            (lhs - rhs).abs() / scale
        };
        self.record(case, lhs, rhs, slack);
    }

    fn absorb(&mut self, other: ReportBuilder) {
        self.total += other.total;
        self.max_slack = self.max_slack.max(other.max_slack);
        self.violations.extend(other.violations);
    }

    pub fn finish(self) -> ViolationReport {
        ViolationReport {
            check_id: self.check_id,
            total_cases: self.total,
            tolerance: self.tolerance,
            violations: self.violations,
            max_slack: self.max_slack,
        }
    }

    /// Merges per-worker builders in the given order.
    pub fn merge(
        check_id: &str,
        tolerance: f64,
        parts: Vec<Result<ReportBuilder>>,
    ) -> Result<ViolationReport> {
        let mut out = ReportBuilder::new(check_id, tolerance);
        for p in parts {
            out.absorb(p?);
        }
        Ok(out.finish())
    }
}

/// Runs `work` for every `n` in parallel, one builder per `(id, tol)`, and
/// merges the builders in `ns` order.
fn sweep_n<F>(ns: Vec<u64>, checks: &[(&str, f64)], work: F) -> Result<Vec<ViolationReport>>
where
    F: Fn(u64, &mut [ReportBuilder]) -> Result<()> + Sync,
{
    let fresh = || -> Vec<ReportBuilder> {
        checks
            .iter()
            .map(|(id, t)| ReportBuilder::new(id, *t))
            .collect()
    };
    let parts: Vec<Result<Vec<ReportBuilder>>> = ns
        .into_par_iter()
        .map(|n| {
            let mut b = fresh();
            work(n, &mut b)?;
            Ok(b)
        })
        .collect();
    let mut out = fresh();
    for p in parts {
        for (acc, b) in out.iter_mut().zip(p?) {
            acc.absorb(b);
        }
    }
    Ok(out.into_iter().map(ReportBuilder::finish).collect())
}

/// `samples` points strictly inside `[j/(n-1), (j+1)/(n-1)]`.
pub fn interior_samples(n: u64, j: u64, samples: usize) -> Vec<f64> {
    let h = (n - 1) as f64;
    (1..=samples)
        .map(|s| (j as f64 + s as f64 / (samples + 1) as f64) / h)
        .collect()
}

/// Interior samples plus both endpoints.
fn closed_samples(n: u64, j: u64, samples: usize) -> Vec<f64> {
    let h = (n - 1) as f64;
    let mut xs = vec![j as f64 / h];
    xs.extend(interior_samples(n, j, samples));
    xs.push((j + 1) as f64 / h);
    xs
}

fn require_n_max(n_max: u64, min: u64) -> Result<()> {
    if n_max < min {
        return Err(domain(format!("n_max must be >= {min}, got {n_max}")));
    }
    Ok(())
}

/// The weight maximum sits at the interval index: over
/// `k in [0, decay start + 200]`, `max ln b_k - ln b_j <= 1e-12`.
pub fn check_lemma41(n_max: u64, j_max: u64, samples: usize) -> Result<ViolationReport> {
    require_n_max(n_max, 2)?;
    let mut r = sweep_n((2..=n_max).collect(), &[("4.1", KERNEL_TOL)], |n, b| {
        for j in 0..=j_max {
            for x in interior_samples(n, j, samples) {
                let jx = interval_index(n, x)?;
                let k_hi = weight_decay_start(n, x)? + 200;
                let at_j = log_basis_weight(n, jx, x)?.log_value();
                let mut best = (f64::NEG_INFINITY, 0u64);
                for k in 0..=k_hi {
                    let lw = log_basis_weight(n, k, x)?.log_value();
                    if lw > best.0 {
                        best = (lw, k);
                    }
                }
                let argmax = best.1;
                b[0].check(|| Case::new(n).j(jx).k(argmax).x(x), best.0, at_j);
            }
        }
        Ok(())
    })?;
    Ok(r.remove(0))
}

/// `m_{k,n,j}(x) <= 1` for `k in [0, j + 4n]`, including both interval
/// endpoints and the origin.
pub fn check_lemma42(n_max: u64, j_max: u64, samples: usize) -> Result<ViolationReport> {
    require_n_max(n_max, 2)?;
    let mut r = sweep_n((2..=n_max).collect(), &[("4.2", KERNEL_TOL)], |n, b| {
        for j in 0..=j_max {
            let mut xs = closed_samples(n, j, samples);
            if j == 0 {
                xs[0] = 0.0;
            }
            for x in xs {
                let row = ratio_row(n, j, x, j + 4 * n)?;
                for (k, &m) in row.iter().enumerate() {
                    b[0].check(|| Case::new(n).j(j).k(k as u64).x(x), m, 1.0);
                }
            }
        }
        Ok(())
    })?;
    Ok(r.remove(0))
}

/// The three comparisons between `M`, `M̄` and `M̲`, each over its own
/// admissible region with `k <= j + 4n`:
/// `4.3.i` `M <= M̄`, `4.3.ii` `M̄ <= 2M`, `4.3.iii` `M̲ <= M <= 2M̲`.
pub fn check_lemma43(n_max: u64, j_max: u64, samples: usize) -> Result<Vec<ViolationReport>> {
    require_n_max(n_max, 3)?;
    let ids = [
        ("4.3.i", KERNEL_TOL),
        ("4.3.ii", KERNEL_TOL),
        ("4.3.iii", KERNEL_TOL),
    ];
    sweep_n((3..=n_max).collect(), &ids, |n, b| {
        for j in 0..=j_max {
            for x in closed_samples(n, j, samples) {
                let row = ratio_row(n, j, x, j + 4 * n)?;
                for (k, &m) in row.iter().enumerate() {
                    let k = k as u64;
                    let plain = m * m_factor(MTermKind::Plain, n, k, x);
                    let case = || Case::new(n).j(j).k(k).x(x);
                    if upper_bar_admissible(n, k, j) {
                        let upper = m * m_factor(MTermKind::UpperBar, n, k, x);
                        b[0].check(case, plain, upper);
                        if upper_bar_doubling_admissible(n, k, j) {
                            b[1].check(case, upper, 2.0 * plain);
                        }
                    }
                    if lower_bar_admissible(n, k, j) {
                        let lower = m * m_factor(MTermKind::LowerBar, n, k, x);
                        b[2].check(|| case().tag("lower"), lower, plain);
                        b[2].check(|| case().tag("upper"), plain, 2.0 * lower);
                    }
                }
            }
        }
        Ok(())
    })
}

/// `(k - j)^α (n - 1) >= (n + j)(k + 1)` together with `k(n-1) >= n(j+1)`.
pub fn upper_monotone_condition(n: u64, j: u64, k: u64, alpha: u32) -> bool {
    if k <= j || !upper_bar_admissible(n, k, j) {
        return false;
    }
    let lhs = u128::from(k - j)
        .saturating_pow(alpha)
        .saturating_mul(u128::from(n - 1));
    lhs >= u128::from(n + j) * u128::from(k + 1)
}

/// `(j - k)^α (n - 1) >= k (n + j - 1)` together with `1 <= k` and `k(n+1) <= nj`.
pub fn lower_monotone_condition(n: u64, j: u64, k: u64, alpha: u32) -> bool {
    if k == 0 || k >= j || !lower_bar_admissible(n, k, j) {
        return false;
    }
    let lhs = u128::from(j - k)
        .saturating_pow(alpha)
        .saturating_mul(u128::from(n - 1));
    lhs >= u128::from(k) * u128::from(n + j - 1)
}

/// Sides of `(k+1)(n+j)(k-j-1) >= (n+k)(j+1)(k-j)`, returned as `(greater, lesser)`.
pub fn upper_integer_sides(n: u64, j: u64, k: u64) -> (i128, i128) {
    let (n, j, k) = (i128::from(n), i128::from(j), i128::from(k));
    ((k + 1) * (n + j) * (k - j - 1), (n + k) * (j + 1) * (k - j))
}

/// Sides of `(n+k-1) j (j-k) >= k (n+j-1)(j-k+1)`, returned as `(greater, lesser)`.
pub fn lower_integer_sides(n: u64, j: u64, k: u64) -> (i128, i128) {
    let (n, j, k) = (i128::from(n), i128::from(j), i128::from(k));
    ((n + k - 1) * j * (j - k), k * (n + j - 1) * (j - k + 1))
}

/// Monotonicity of `M̄` and `M̲` under the power conditions, plus the two
/// integer inequalities on every enumerated tuple. Four sub-reports:
/// `4.4.i`, `4.4.ii`, `ineq.upper`, `ineq.lower`.
pub fn check_lemma44(n_max: u64, j_max: u64, alpha_max: u32) -> Result<Vec<ViolationReport>> {
    require_n_max(n_max, 3)?;
    if alpha_max < 2 {
        return Err(domain(format!("alpha_max must be >= 2, got {alpha_max}")));
    }
    let ids = [
        ("4.4.i", KERNEL_TOL),
        ("4.4.ii", KERNEL_TOL),
        ("ineq.upper", 0.0),
        ("ineq.lower", 0.0),
    ];
    sweep_n((3..=n_max).collect(), &ids, |n, b| {
        for j in 0..=j_max {
            let k_cap = j + 4 * n;
            let xs = interior_samples(n, j, 3);
            let rows: Vec<Vec<f64>> = xs
                .iter()
                .map(|&x| ratio_row(n, j, x, k_cap + 1))
                .collect::<Result<_>>()?;
            for alpha in 2..=alpha_max {
                for k in 0..=k_cap {
                    let case = || Case::new(n).j(j).k(k).alpha(alpha);
                    if upper_monotone_condition(n, j, k, alpha) {
                        let (g, l) = upper_integer_sides(n, j, k);
                        b[2].check(case, l as f64, g as f64);
                        for (x, row) in xs.iter().zip(&rows) {
                            let cur = row[k as usize] * m_factor(MTermKind::UpperBar, n, k, *x);
                            let next =
                                row[k as usize + 1] * m_factor(MTermKind::UpperBar, n, k + 1, *x);
                            b[0].check(|| case().x(*x), next, cur);
                        }
                    }
                    if lower_monotone_condition(n, j, k, alpha) {
                        let (g, l) = lower_integer_sides(n, j, k);
                        b[3].check(case, l as f64, g as f64);
                        for (x, row) in xs.iter().zip(&rows) {
                            let cur = row[k as usize] * m_factor(MTermKind::LowerBar, n, k, *x);
                            let prev =
                                row[k as usize - 1] * m_factor(MTermKind::LowerBar, n, k - 1, *x);
                            b[1].check(|| case().x(*x), prev, cur);
                        }
                    }
                }
            }
        }
        Ok(())
    })
}

const COMBO_COEFFS: [f64; 4] = [0.0, 0.5, 1.0, 2.0];
const HOMOGENEITY_SCALES: [f64; 3] = [0.0, 0.25, 3.0];
/// Sample points for the algebra sweep are drawn from `[0, ALGEBRA_X_MAX)`.
pub const ALGEBRA_X_MAX: f64 = 4.0;

/// Seeded pairs of registry ids.
pub fn algebra_pairs(pair_count: usize, seed: u64) -> Vec<(&'static str, &'static str)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..pair_count)
        .map(|_| {
            let f = *REGISTRY_IDS.choose(&mut rng).expect("registry is nonempty");
            let g = *REGISTRY_IDS.choose(&mut rng).expect("registry is nonempty");
            (f, g)
        })
        .collect()
}

/// Seeded sample points; drawn after the pairs from the same stream.
fn algebra_xs(pair_count: usize, x_samples: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..2 * pair_count {
        let _ = REGISTRY_IDS.choose(&mut rng);
    }
    (0..x_samples)
        .map(|_| rng.gen_range(0.0..ALGEBRA_X_MAX))
        .collect()
}

/// Operator algebra on seeded registry pairs. Sub-reports:
/// `pseudo_linearity`, `monotonicity`, `homogeneity`, `contraction`,
/// `e0_identity`, `origin`.
pub fn check_algebra(
    n_list: &[u64],
    x_samples: usize,
    pair_count: usize,
    seed: u64,
) -> Result<Vec<ViolationReport>> {
    if let Some(&n) = n_list.iter().find(|&&n| n < 3) {
        return Err(domain(format!("algebra checks need n >= 3, got {n}")));
    }
    let pairs = algebra_pairs(pair_count, seed);
    let xs = algebra_xs(pair_count, x_samples, seed);
    let e0 = get_function("e0")?;
    let ids = [
        ("pseudo_linearity", ALGEBRA_TOL),
        ("monotonicity", KERNEL_TOL),
        ("homogeneity", KERNEL_TOL),
        ("contraction", ALGEBRA_TOL),
        ("e0_identity", 0.0),
        ("origin", 0.0),
    ];
    let v = |f: &_, n, x| -> Result<f64> { Ok(eval_max_product(f, n, x, DEFAULT_TOL)?.value) };
    sweep_n(n_list.to_vec(), &ids, |n, b| {
        for &x in &xs {
            let e = v(&e0, n, x)?;
            b[4].check_close(|| Case::point(n, x).tag("e0"), e, 1.0);
        }
        for &(fid, gid) in &pairs {
            let f = get_function(fid)?;
            let g = get_function(gid)?;
            let tag = format!("f={fid} g={gid}");
            let vf0 = v(&f, n, 0.0)?;
            b[5].check_close(
                || Case::point(n, 0.0).tag(format!("f={fid}")),
                vf0,
                f.eval(0.0),
            );

            let joined = max_scale_combine(&f, &g, 1.0, 1.0)?;
            let diff = abs_diff(&f, &g);
            let combos: Vec<_> = COMBO_COEFFS
                .iter()
                .flat_map(|&a| COMBO_COEFFS.iter().map(move |&c| (a, c)))
                .map(|(a, c)| Ok((a, c, max_scale_combine(&f, &g, a, c)?)))
                .collect::<Result<_>>()?;
            let scaled_f: Vec<_> = HOMOGENEITY_SCALES
                .iter()
                .map(|&l| Ok((l, scaled(&f, l)?)))
                .collect::<Result<_>>()?;

            for &x in &xs {
                let case = || Case::point(n, x).tag(tag.clone());
                let vf = v(&f, n, x)?;
                let vg = v(&g, n, x)?;
                for (a, c, h) in &combos {
                    let lhs = v(h, n, x)?;
                    b[0].check_close(
                        || case().tag(format!("{tag} a={a} b={c}")),
                        lhs,
                        (a * vf).max(c * vg),
                    );
                }
                let vj = v(&joined, n, x)?;
                b[1].check_scaled(|| case().tag(format!("{tag} f<=max")), vf, vj);
                b[1].check_scaled(|| case().tag(format!("{tag} g<=max")), vg, vj);
                for (l, h) in &scaled_f {
                    let lhs = v(h, n, x)?;
                    b[2].check_close(|| case().tag(format!("{tag} lambda={l}")), lhs, l * vf);
                }
                let vd = v(&diff, n, x)?;
                b[3].check_scaled(case, (vf - vg).abs(), vd);
            }
        }
        Ok(())
    })
}

/// Default sweeps used by the command line and the acceptance suite.
pub mod defaults {
    pub const LEMMA41: (u64, u64, usize) = (64, 50, 5);
    pub const LEMMA42: (u64, u64, usize) = (20, 40, 5);
    pub const LEMMA43: (u64, u64, usize) = (20, 30, 5);
    pub const LEMMA44: (u64, u64, u32) = (16, 20, 5);
    pub const ALGEBRA_X_SAMPLES: usize = 20;
    pub const ALGEBRA_PAIRS: usize = 16;
    pub const SEED: u64 = 42;

    pub fn algebra_ns() -> Vec<u64> {
        (3..=32).collect()
    }
}
