//! Right-hand sides of the pointwise, weighted and weighted-uniform error
//! bounds, their hypothesis predicates, and sweep verification.
//!
//! Every record compares a left-hand side measured with the certified
//! operator evaluator against a right-hand side built from certified modulus
//! upper bounds, so a `fail` verdict is always a genuine counterexample.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::functions::{get_function, FuncSpec};
use crate::kernel::interval_index;
use crate::lemma_verify::{Case, ReportBuilder, ViolationReport};
use crate::moduli::{
    modulus_upper, rho0, weighted_modulus_rho0, DEFAULT_GRID_POINTS, DEFAULT_WEIGHTED_DOMAIN,
};
use crate::operators::{eval_max_product, eval_phi_error, DEFAULT_TOL};

/// Constant in the uniform weighted bound.
pub const UNIFORM_WEIGHTED_CONSTANT: f64 = 70.0;
/// Constant in the envelope `E_n(x) <= 6 [x(1+x)]^{1/α} / (n-1)^{1-1/α}`.
pub const ENVELOPE_CONSTANT: f64 = 6.0;
/// Relative slack allowed on a `lhs <= rhs` verdict.
pub const VERDICT_TOL: f64 = 1e-10;

pub const DEFAULT_ALPHAS: [u32; 5] = [2, 3, 4, 6, 8];

/// Powers of two in `[4, 1024]`.
pub fn default_ns() -> Vec<u64> {
    (2..=10).map(|p| 1u64 << p).collect()
}

/// 33 points on `[0, 2]` plus `{5, 10}`.
pub fn default_xs() -> Vec<f64> {
    let mut xs: Vec<f64> = (0..=32).map(|i| 2.0 * i as f64 / 32.0).collect();
    xs.extend([5.0, 10.0]);
    xs
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundParams {
    pub alpha: u32,
    pub n: u64,
    pub x: f64,
    /// `(n-1)^{-(1-1/α)}`
    pub delta_n: f64,
}

impl BoundParams {
    pub fn new(x: f64, n: u64, alpha: u32) -> Result<Self> {
        if alpha < 2 {
            return Err(domain(format!("alpha must be >= 2, got {alpha}")));
        }
        if n < 2 {
            return Err(domain(format!("n must be >= 2, got {n}")));
        }
        if !(x >= 0.0) || !x.is_finite() {
            return Err(domain(format!("x must be finite and >= 0, got {x}")));
        }
        Ok(BoundParams {
            alpha,
            n,
            x,
            delta_n: delta_n(n, alpha),
        })
    }
}

/// `(n-1)^{-(1-1/α)}`.
pub fn delta_n(n: u64, alpha: u32) -> f64 {
    ((n - 1) as f64).powf(-(1.0 - 1.0 / alpha as f64))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypotheses {
    /// `x^{α-2} <= n-1`
    pub pow_cond: bool,
    /// `n >= j^{α-1}` with `j` the interval index of `x`
    pub j_cond: bool,
    /// `n >= 4`
    pub n_cond: bool,
}

impl Hypotheses {
    pub fn all(&self) -> bool {
        self.pow_cond && self.j_cond && self.n_cond
    }
}

/// Hypotheses of the pointwise theorem at `(x, n, α)`.
pub fn hypothesis_51(x: f64, n: u64, alpha: u32) -> Result<Hypotheses> {
    let p = BoundParams::new(x, n, alpha)?;
    let pow_cond = p.x.powi(alpha as i32 - 2) <= (n - 1) as f64;
    let j = interval_index(n, x)?;
    let j_cond = match u128::from(j).checked_pow(alpha - 1) {
        Some(jp) => u128::from(n) >= jp,
        None => false,
    };
    Ok(Hypotheses {
        pow_cond,
        j_cond,
        n_cond: n >= 4,
    })
}

fn require(x: f64, n: u64, alpha: u32) -> Result<BoundParams> {
    let h = hypothesis_51(x, n, alpha)?;
    if !h.all() {
        return Err(Error::Hypothesis(format!(
            "x={x} n={n} alpha={alpha}: pow_cond={} j_cond={} n_cond={}",
            h.pow_cond, h.j_cond, h.n_cond
        )));
    }
    BoundParams::new(x, n, alpha)
}

#[inline]
fn growth_root(x: f64, alpha: u32) -> f64 {
    (x * (1.0 + x)).powf(1.0 / alpha as f64)
}

fn envelope_formula(p: &BoundParams) -> f64 {
    ENVELOPE_CONSTANT * growth_root(p.x, p.alpha) * p.delta_n
}

/// `6 [x(1+x)]^{1/α} / (n-1)^{1-1/α}` without the hypothesis check.
pub fn envelope_value(x: f64, n: u64, alpha: u32) -> Result<f64> {
    Ok(envelope_formula(&BoundParams::new(x, n, alpha)?))
}

/// [`envelope_value`], refusing tuples outside the hypotheses.
pub fn envelope_rhs(x: f64, n: u64, alpha: u32) -> Result<f64> {
    Ok(envelope_formula(&require(x, n, alpha)?))
}

/// `(1 + 6 [x(1+x)]^{1/α})`, the pointwise bound factor.
pub fn pointwise_factor(x: f64, alpha: u32) -> f64 {
    1.0 + ENVELOPE_CONSTANT * growth_root(x, alpha)
}

/// `(1 + 9x²)(1 + 6 [x(1+x)]^{1/α}) / (1 + x²)²`.
pub fn weighted_factor(x: f64, alpha: u32) -> f64 {
    (1.0 + 9.0 * x * x) * pointwise_factor(x, alpha) / (rho0(x) * rho0(x))
}

fn classical_certificate(f: &FuncSpec, delta: f64) -> Result<f64> {
    modulus_upper(f, delta).ok_or_else(|| Error::NoCertificate(f.id().to_string()))
}

fn weighted_certificate(f: &FuncSpec, delta: f64) -> Result<f64> {
    weighted_modulus_rho0(f, delta, DEFAULT_WEIGHTED_DOMAIN, DEFAULT_GRID_POINTS)?
        .upper
        .ok_or_else(|| Error::NoCertificate(f.id().to_string()))
}

/// `(1 + 6 [x(1+x)]^{1/α}) ω(f, δ_n)` with a certified modulus upper.
pub fn rhs_theorem51(f: &FuncSpec, x: f64, n: u64, alpha: u32) -> Result<f64> {
    let p = require(x, n, alpha)?;
    Ok(pointwise_factor(x, alpha) * classical_certificate(f, p.delta_n)?)
}

/// Weighted pointwise bound, to be compared against `|V(f)(x) - f(x)| / ρ₀(x)²`.
pub fn rhs_theorem61(f: &FuncSpec, x: f64, n: u64, alpha: u32) -> Result<f64> {
    if !f.in_c0_rho0() {
        return Err(Error::NotWeighted(f.id().to_string()));
    }
    let p = require(x, n, alpha)?;
    Ok(weighted_factor(x, alpha) * weighted_certificate(f, p.delta_n)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    HypNotMet,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::HypNotMet => "hyp_not_met",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundRecord {
    pub func_id: String,
    pub params: BoundParams,
    pub lhs: f64,
    pub rhs: f64,
    pub hyp: Hypotheses,
    pub margin: f64,
    pub verdict: Verdict,
}

impl BoundRecord {
    pub fn new(func_id: &str, params: BoundParams, lhs: f64, rhs: f64, hyp: Hypotheses) -> Self {
        let margin = rhs - lhs;
        let verdict = if !hyp.all() {
            Verdict::HypNotMet
        } else if margin >= -VERDICT_TOL * rhs.max(1.0) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        BoundRecord {
            func_id: func_id.to_string(),
            params,
            lhs,
            rhs,
            hyp,
            margin,
            verdict,
        }
    }
}

fn bounded_with_certificate(f: &FuncSpec) -> Result<()> {
    if !f.is_bounded() {
        return Err(Error::Unbounded(f.id().to_string()));
    }
    if modulus_upper(f, 1.0).is_none() {
        return Err(Error::NoCertificate(f.id().to_string()));
    }
    Ok(())
}

/// Runs `row` over `(n, α, x)` in lexicographic order, parallel over `n`.
fn sweep<F>(xs: &[f64], ns: &[u64], alphas: &[u32], row: F) -> Result<Vec<BoundRecord>>
where
    F: Fn(f64, u64, u32) -> Result<BoundRecord> + Sync,
{
    let chunks: Vec<Result<Vec<BoundRecord>>> = ns
        .par_iter()
        .map(|&n| {
            let mut out = Vec::with_capacity(alphas.len() * xs.len());
            for &a in alphas {
                for &x in xs {
                    out.push(row(x, n, a)?);
                }
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for c in chunks {
        all.extend(c?);
    }
    Ok(all)
}

/// Pointwise bound over a sweep: `lhs = |V(f)(x) - f(x)|`.
pub fn verify_theorem51(
    f: &FuncSpec,
    xs: &[f64],
    ns: &[u64],
    alphas: &[u32],
    tol: f64,
) -> Result<Vec<BoundRecord>> {
    bounded_with_certificate(f)?;
    sweep(xs, ns, alphas, |x, n, a| {
        let p = BoundParams::new(x, n, a)?;
        let hyp = hypothesis_51(x, n, a)?;
        let v = eval_max_product(f, n, x, tol)?.value;
        let lhs = (v - f.eval(x)).abs();
        let rhs = pointwise_factor(x, a) * classical_certificate(f, p.delta_n)?;
        Ok(BoundRecord::new(f.id(), p, lhs, rhs, hyp))
    })
}

/// Envelope over a sweep: `lhs = E_n(x)`. Requires every `n >= 3`.
pub fn verify_envelope(
    xs: &[f64],
    ns: &[u64],
    alphas: &[u32],
    tol: f64,
) -> Result<Vec<BoundRecord>> {
    sweep(xs, ns, alphas, |x, n, a| {
        let p = BoundParams::new(x, n, a)?;
        let hyp = hypothesis_51(x, n, a)?;
        let lhs = eval_phi_error(n, x, tol)?.value;
        Ok(BoundRecord::new("phi", p, lhs, envelope_formula(&p), hyp))
    })
}

/// Weighted pointwise bound: `lhs = |V(f)(x) - f(x)| / ρ₀(x)²`.
pub fn verify_theorem61(
    f: &FuncSpec,
    xs: &[f64],
    ns: &[u64],
    alphas: &[u32],
    tol: f64,
) -> Result<Vec<BoundRecord>> {
    if !f.in_c0_rho0() {
        return Err(Error::NotWeighted(f.id().to_string()));
    }
    sweep(xs, ns, alphas, |x, n, a| {
        let p = BoundParams::new(x, n, a)?;
        let hyp = hypothesis_51(x, n, a)?;
        let v = eval_max_product(f, n, x, tol)?.value;
        let lhs = (v - f.eval(x)).abs() / (rho0(x) * rho0(x));
        let rhs = weighted_factor(x, a) * weighted_certificate(f, p.delta_n)?;
        Ok(BoundRecord::new(f.id(), p, lhs, rhs, hyp))
    })
}

/// Uniform weighted bound, one record per `(n, α)`.
///
/// The left side is the supremum of `|V(f)(x) - f(x)| / ρ₀(x)²` over the
/// sweep points that satisfy the pointwise hypotheses; `x` in the record is
/// where it is attained. When no sweep point qualifies the supremum is taken
/// over all points and the record is marked `hyp_not_met`.
pub fn verify_theorem62(
    f: &FuncSpec,
    xs: &[f64],
    ns: &[u64],
    alphas: &[u32],
    tol: f64,
) -> Result<Vec<BoundRecord>> {
    if !f.in_c0_rho0() {
        return Err(Error::NotWeighted(f.id().to_string()));
    }
    if xs.is_empty() {
        return Err(domain("uniform bound needs at least one x"));
    }
    let chunks: Vec<Result<Vec<BoundRecord>>> = ns
        .par_iter()
        .map(|&n| {
            let mut out = Vec::with_capacity(alphas.len());
            let errs: Vec<(f64, f64)> = xs
                .iter()
                .map(|&x| {
                    let v = eval_max_product(f, n, x, tol)?.value;
                    Ok((x, (v - f.eval(x)).abs() / (rho0(x) * rho0(x))))
                })
                .collect::<Result<_>>()?;
            for &a in alphas {
                let mut qualified = false;
                let mut best: Option<(f64, f64)> = None;
                let mut best_any: Option<(f64, f64)> = None;
                for &(x, e) in &errs {
                    let h = hypothesis_51(x, n, a)?;
                    if best_any.is_none_or(|(_, b)| e > b) {
                        best_any = Some((x, e));
                    }
                    if h.pow_cond && h.j_cond {
                        qualified = true;
                        if best.is_none_or(|(_, b)| e > b) {
                            best = Some((x, e));
                        }
                    }
                }
                let (x, lhs) = best.or(best_any).expect("xs is nonempty");
                let p = BoundParams::new(x, n, a)?;
                let hyp = Hypotheses {
                    pow_cond: qualified,
                    j_cond: qualified,
                    n_cond: n >= 4,
                };
                let rhs = UNIFORM_WEIGHTED_CONSTANT * weighted_certificate(f, p.delta_n)?;
                out.push(BoundRecord::new(f.id(), p, lhs, rhs, hyp));
            }
            Ok(out)
        })
        .collect();
    let mut all = Vec::new();
    for c in chunks {
        all.extend(c?);
    }
    Ok(all)
}

/// Grid supremum of [`weighted_factor`] over `[0, x_max]`, with its argmax.
pub fn weighted_factor_sup(alpha: u32, x_max: f64, points: usize) -> (f64, f64) {
    (0..points)
        .map(|i| {
            let x = x_max * i as f64 / (points - 1) as f64;
            (weighted_factor(x, alpha), x)
        })
        .fold(
            (f64::NEG_INFINITY, 0.0),
            |acc, c| if c.0 > acc.0 { c } else { acc },
        )
}

/// Measures `V(e1)(x) - x`; a violation is a difference above `1e-10`.
pub fn check_e1_bound(ns: &[u64], xs: &[f64]) -> Result<ViolationReport> {
    let e1 = get_function("e1")?;
    let parts: Vec<Result<ReportBuilder>> = ns
        .par_iter()
        .map(|&n| {
            let mut rb = ReportBuilder::new("e1_below_identity", 1e-10);
            for &x in xs {
                let v = eval_max_product(&e1, n, x, DEFAULT_TOL)?.value;
                rb.check(|| Case::point(n, x), v, x);
            }
            Ok(rb)
        })
        .collect();
    ReportBuilder::merge("e1_below_identity", 1e-10, parts)
}

/// Least-squares slope of `ln(value)` against `ln(n - 1)`.
pub fn empirical_order(series: &[(u64, f64)]) -> Result<f64> {
    if series.len() < 4 {
        return Err(Error::Degenerate(format!(
            "need at least 4 points, got {}",
            series.len()
        )));
    }
    if let Some(&(n, v)) = series.iter().find(|(n, v)| !(*v > 0.0) || *n < 2) {
        return Err(Error::Degenerate(format!(
            "values must be > 0 with n >= 2; got n={n} value={v}"
        )));
    }
    let pts: Vec<(f64, f64)> = series
        .iter()
        .map(|&(n, v)| (((n - 1) as f64).ln(), v.ln()))
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all n are equal".into()));
    }
    Ok(sxy / sxx)
}

/// `(n, E_n(x))` for each `n`.
pub fn phi_error_series(x: f64, ns: &[u64], tol: f64) -> Result<Vec<(u64, f64)>> {
    ns.par_iter()
        .map(|&n| Ok((n, eval_phi_error(n, x, tol)?.value)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hypothesis_examples() {
        let h = hypothesis_51(0.6, 4, 2).unwrap();
        assert!(h.all());
        let h = hypothesis_51(2.0, 4, 3).unwrap();
        assert!(!h.j_cond);
        assert!(!hypothesis_51(0.3, 3, 2).unwrap().n_cond);
        // j = 0 always passes, even with 0^{α-1}
        assert!(hypothesis_51(0.1, 8, 5).unwrap().j_cond);
        assert!(hypothesis_51(0.5, 4, 1).is_err());
    }

    #[test]
    fn envelope_examples() {
        assert_eq!(envelope_rhs(0.0, 9, 3).unwrap(), 0.0);
        let v = envelope_rhs(0.6, 4, 2).unwrap();
        assert!((v - 6.0 * 0.96f64.sqrt() / 3f64.sqrt()).abs() < 1e-14);
        assert!((v - 3.394112549695428).abs() < 1e-12);
        // j = 9 and 9^2 > 10, so only the unchecked formula applies
        let v = envelope_value(1.0, 10, 3).unwrap();
        assert!((v - 6.0 * 2f64.cbrt() / 9f64.powf(2.0 / 3.0)).abs() < 1e-14);
        assert!((v - 1.747160).abs() < 1e-5);
        assert!(matches!(
            envelope_rhs(1.0, 10, 3),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(envelope_rhs(2.0, 4, 3), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn rhs51_examples() {
        let e0 = get_function("e0").unwrap();
        assert_eq!(rhs_theorem51(&e0, 0.6, 8, 2).unwrap(), 0.0);
        let r = get_function("ratio").unwrap();
        let d = 1.0 / 3f64.sqrt();
        let want = (1.0 + 6.0 * 0.96f64.sqrt()) * d / (1.0 + d);
        let got = rhs_theorem51(&r, 0.6, 4, 2).unwrap();
        assert!((got - want).abs() < 1e-14);
        assert!((got - 2.5178).abs() < 1e-4);
        let v = get_function("vee1").unwrap();
        let got = rhs_theorem51(&v, 0.0, 16, 3).unwrap();
        assert!((got - delta_n(16, 3)).abs() < 1e-15);
        let e2 = get_function("e2").unwrap();
        assert!(matches!(
            rhs_theorem51(&e2, 0.5, 8, 2),
            Err(Error::NoCertificate(_))
        ));
    }

    #[test]
    fn rhs61_examples() {
        let e0 = get_function("e0").unwrap();
        assert_eq!(rhs_theorem61(&e0, 0.6, 8, 2).unwrap(), 0.0);
        let b = get_function("bump").unwrap();
        let d = delta_n(8, 2);
        let w = weighted_modulus_rho0(&b, d, 50.0, 4096)
            .unwrap()
            .upper
            .unwrap();
        let got = rhs_theorem61(&b, 1.0, 8, 2).unwrap();
        let factor = 10.0 * (1.0 + 6.0 * 2f64.sqrt()) / 4.0;
        assert!((factor - 23.713).abs() < 1e-3);
        assert!((got - factor * w).abs() < 1e-13);
        assert!((rhs_theorem61(&b, 0.0, 8, 2).unwrap() - w).abs() < 1e-16);
    }

    #[test]
    fn verdict_rule() {
        let p = BoundParams::new(0.5, 8, 2).unwrap();
        let yes = Hypotheses {
            pow_cond: true,
            j_cond: true,
            n_cond: true,
        };
        assert_eq!(
            BoundRecord::new("f", p, 1.0, 1.0, yes).verdict,
            Verdict::Pass
        );
        assert_eq!(
            BoundRecord::new("f", p, 1.0 + 5e-11, 1.0, yes).verdict,
            Verdict::Pass
        );
        assert_eq!(
            BoundRecord::new("f", p, 1.1, 1.0, yes).verdict,
            Verdict::Fail
        );
        let no = Hypotheses {
            n_cond: false,
            ..yes
        };
        assert_eq!(
            BoundRecord::new("f", p, 9.0, 1.0, no).verdict,
            Verdict::HypNotMet
        );
    }

    #[test]
    fn theorem51_small_sweeps() {
        let e0 = get_function("e0").unwrap();
        let recs = verify_theorem51(&e0, &[0.0, 0.4, 1.3], &[4, 9], &[2, 3], DEFAULT_TOL).unwrap();
        assert_eq!(recs.len(), 12);
        assert!(recs
            .iter()
            .all(|r| r.lhs == 0.0 && r.verdict != Verdict::Fail));
        // x = 1.3, n = 4, alpha = 3 has j = 3 and 3^2 > 4
        let out = recs
            .iter()
            .find(|r| r.params.n == 4 && r.params.alpha == 3 && r.params.x == 1.3)
            .unwrap();
        assert_eq!(out.verdict, Verdict::HypNotMet);

        let v = get_function("vee1").unwrap();
        let r = &verify_theorem51(&v, &[1.0], &[4], &[2], DEFAULT_TOL).unwrap()[0];
        assert!(r.lhs <= r.rhs);
        assert!(matches!(
            verify_theorem51(
                &get_function("e1").unwrap(),
                &[0.5],
                &[4],
                &[2],
                DEFAULT_TOL
            ),
            Err(Error::Unbounded(_))
        ));
    }

    #[test]
    fn envelope_outside_hypotheses_still_measured() {
        let r = &verify_envelope(&[0.6], &[8], &[3], DEFAULT_TOL).unwrap()[0];
        assert_eq!(r.verdict, Verdict::HypNotMet);
        assert!((r.rhs - 6.0 * 0.96f64.cbrt() / 49f64.cbrt()).abs() < 1e-14);
        // brute force over k <= 500 from exact linear weights
        let mut best = 0.0f64;
        let (n, x) = (8u64, 0.6f64);
        let mut w = (1.0 + x).powi(-(n as i32));
        let mut wj = 0.0;
        let mut terms = vec![];
        for k in 0..=500u64 {
            terms.push((k, w));
            if k == 4 {
                wj = w;
            }
            w *= (n + k) as f64 / (k + 1) as f64 * x / (1.0 + x);
        }
        for (k, w) in terms {
            best = best.max(w / wj * (k as f64 / n as f64 - x).abs());
        }
        assert!((r.lhs - best).abs() <= 1e-12 * best);
        assert!(r.lhs <= r.rhs);
    }

    #[test]
    fn envelope_rows_at_origin() {
        let recs = verify_envelope(&[0.0], &[4, 16], &[2, 5], DEFAULT_TOL).unwrap();
        assert!(recs
            .iter()
            .all(|r| r.lhs == 0.0 && r.verdict == Verdict::Pass));
    }

    #[test]
    fn order_of_exact_power_laws() {
        let ns: Vec<u64> = (3..=10).map(|p| 1u64 << p).collect();
        let s: Vec<(u64, f64)> = ns.iter().map(|&n| (n, 3.0 / (n - 1) as f64)).collect();
        assert!((empirical_order(&s).unwrap() + 1.0).abs() < 1e-12);
        let s: Vec<(u64, f64)> = ns
            .iter()
            .map(|&n| (n, 0.7 / ((n - 1) as f64).sqrt()))
            .collect();
        assert!((empirical_order(&s).unwrap() + 0.5).abs() < 1e-12);
        assert!(empirical_order(&s[..3]).is_err());
        let mut bad = s.clone();
        bad[1].1 = 0.0;
        assert!(matches!(empirical_order(&bad), Err(Error::Degenerate(_))));
    }

    #[test]
    fn weighted_factor_stays_below_constant() {
        for a in 2..=8 {
            let (sup, _) = weighted_factor_sup(a, 100.0, 10_000);
            assert!(sup <= UNIFORM_WEIGHTED_CONSTANT);
        }
    }
}
