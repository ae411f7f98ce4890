//! Max-product and classical Baskakov operators with certified truncation.
//!
//! The max-product operator is
//! `V(f)(x) = max_k b_{n,k}(x) f(k/n) / max_k b_{n,k}(x)`. The denominator is
//! `b_{n,j}(x)` with `j = floor((n-1)x)`, so the value is
//! `max_k m_{k,n,j}(x) f(k/n)`. Every `k <= j` is examined exactly; above `j`
//! the scan stops once a decreasing envelope of all remaining terms is below
//! `tol` times the running maximum.

use crate::error::{domain, Error, Result};
use crate::functions::FuncSpec;
use crate::kernel::{interval_index, log_basis_weight, weight_decay_start, RatioWalk};

pub const DEFAULT_TOL: f64 = 1e-12;

/// Hard cap on terms examined above `j` in a single evaluation.
pub const MAX_SCAN_TERMS: u64 = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalResult {
    pub value: f64,
    /// Smallest `k` attaining the maximum; `None` for the sum form.
    pub argmax_k: Option<u64>,
    pub terms_examined: u64,
    /// Bound on any single omitted term (max-product) or on the omitted tail
    /// sum (classical).
    pub tail_bound: f64,
    pub certified: bool,
}

impl EvalResult {
    fn exact(value: f64) -> Self {
        EvalResult {
            value,
            argmax_k: Some(0),
            terms_examined: 1,
            tail_bound: 0.0,
            certified: true,
        }
    }
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(domain(format!("tol must lie in (0, 1e-3], got {tol}")));
    }
    Ok(())
}

fn check_x(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain(format!("x must be finite and >= 0, got {x}")));
    }
    Ok(())
}

fn sample(f: &FuncSpec, t: f64) -> Result<f64> {
    let v = f.eval(t);
    if !(v >= 0.0) {
        return Err(domain(format!(
            "{} returned {v} at {t}; values must be >= 0",
            f.id()
        )));
    }
    Ok(v)
}

#[derive(Default)]
struct Best {
    value: f64,
    argmax: u64,
}

impl Best {
    fn offer(&mut self, k: u64, v: f64) {
        if v > self.value || (v == self.value && k < self.argmax) {
            self.value = v;
            self.argmax = k;
        }
    }
}

/// `V_n^{(M)}(f)(x)`.
pub fn eval_max_product(f: &FuncSpec, n: u64, x: f64, tol: f64) -> Result<EvalResult> {
    if n < 2 {
        return Err(domain("max-product operator needs n >= 2"));
    }
    check_tol(tol)?;
    check_x(x)?;
    if x == 0.0 {
        return Ok(EvalResult::exact(sample(f, 0.0)?));
    }
    let nf = n as f64;
    let j = interval_index(n, x)?;
    let decay = weight_decay_start(n, x)?;
    let walk = RatioWalk::new(n, j, x)?;
    let growth = f.growth();

    let mut best = Best {
        value: 0.0,
        argmax: j,
    };
    let mut examined = 0u64;
    for (k, lm) in walk.down() {
        best.offer(k, lm.exp() * sample(f, k as f64 / nf)?);
        examined += 1;
    }

    let mut k = j;
    let mut lm = 0.0;
    loop {
        let step = walk.log_step(k);
        let next_lm = lm + step;
        if k >= decay {
            // envelope ratio r_k ((n+k+1)/(n+k))^p; both factors decrease in k
            let env_ratio =
                step.exp() * ((nf + k as f64 + 1.0) / (nf + k as f64)).powi(growth.degree as i32);
            if env_ratio <= 1.0 {
                let env_next = next_lm.exp() * growth.at((k + 1) as f64 / nf);
                if env_next <= tol * best.value {
                    return Ok(EvalResult {
                        value: best.value,
                        argmax_k: Some(best.argmax),
                        terms_examined: examined,
                        tail_bound: env_next,
                        certified: true,
                    });
                }
            }
        }
        if k - j >= MAX_SCAN_TERMS {
            return Err(Error::NotCertified(format!(
                "{} at n={n}, x={x}: no certificate after {MAX_SCAN_TERMS} terms",
                f.id()
            )));
        }
        k += 1;
        lm = next_lm;
        best.offer(k, lm.exp() * sample(f, k as f64 / nf)?);
        examined += 1;
    }
}

/// `E_n(x) = V_n^{(M)}(|· - x|)(x) = max_k m_{k,n,j}(x) |k/n - x|`.
///
/// Above `max(nx, decay start)` the term ratio
/// `r_k (k+1-nx)/(k-nx)` is a product of two decreasing factors, so once it
/// drops below one every later term is smaller than the next one.
pub fn eval_phi_error(n: u64, x: f64, tol: f64) -> Result<EvalResult> {
    if n < 3 {
        return Err(domain("phi error needs n >= 3"));
    }
    check_tol(tol)?;
    check_x(x)?;
    if x == 0.0 {
        return Ok(EvalResult::exact(0.0));
    }
    let nf = n as f64;
    let nx = nf * x;
    let j = interval_index(n, x)?;
    let decay = weight_decay_start(n, x)?;
    let walk = RatioWalk::new(n, j, x)?;
    let dist = |k: u64| (k as f64 / nf - x).abs();

    let mut best = Best {
        value: 0.0,
        argmax: j,
    };
    let mut examined = 0u64;
    for (k, lm) in walk.down() {
        best.offer(k, lm.exp() * dist(k));
        examined += 1;
    }

    let mut k = j;
    let mut lm = 0.0;
    loop {
        let step = walk.log_step(k);
        let next_lm = lm + step;
        let kf = k as f64;
        if k >= decay && kf > nx {
            let ratio = step.exp() * (kf + 1.0 - nx) / (kf - nx);
            if ratio < 1.0 {
                let next = next_lm.exp() * dist(k + 1);
                if next <= tol * best.value {
                    return Ok(EvalResult {
                        value: best.value,
                        argmax_k: Some(best.argmax),
                        terms_examined: examined,
                        tail_bound: next,
                        certified: true,
                    });
                }
            }
        }
        if k - j >= MAX_SCAN_TERMS {
            return Err(Error::NotCertified(format!(
                "phi error at n={n}, x={x}: no certificate after {MAX_SCAN_TERMS} terms"
            )));
        }
        k += 1;
        lm = next_lm;
        best.offer(k, lm.exp() * dist(k));
        examined += 1;
    }
}

/// The classical sum-form operator `V_n(f)(x) = sum_k b_{n,k}(x) f(k/n)`.
///
/// Past the decay start the envelope terms `b_{n,k} c (1+k/n)^p` shrink
/// geometrically with ratio at most `rho_K`, giving the tail bound
/// `env(K) / (1 - rho_K)`.
pub fn eval_classical(f: &FuncSpec, n: u64, x: f64, tol: f64) -> Result<EvalResult> {
    if n < 1 {
        return Err(domain("classical operator needs n >= 1"));
    }
    if !(tol > 0.0 && tol < 1.0) {
        return Err(domain(format!("tol must lie in (0, 1), got {tol}")));
    }
    check_x(x)?;
    if x == 0.0 {
        let mut r = EvalResult::exact(sample(f, 0.0)?);
        r.argmax_k = None;
        return Ok(r);
    }
    let nf = n as f64;
    let decay = weight_decay_start(n, x)?;
    let growth = f.growth();
    let lq = crate::kernel::log_odds(x);
    let env_ratio = |k: u64| {
        crate::kernel::log_step(n, k, lq).exp()
            * ((nf + k as f64 + 1.0) / (nf + k as f64)).powi(growth.degree as i32)
    };

    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut k = 0u64;
    loop {
        let b = log_basis_weight(n, k, x)?.value();
        // Neumaier summation
        let term = b * sample(f, k as f64 / nf)?;
        let t = sum + term;
        comp += if sum.abs() >= term.abs() {
            (sum - t) + term
        } else {
            (term - t) + sum
        };
        sum = t;

        let next = k + 1;
        if next > decay {
            let rho = env_ratio(next);
            if rho < 1.0 {
                let env = log_basis_weight(n, next, x)?.value() * growth.at(next as f64 / nf);
                let tail = env / (1.0 - rho);
                let total = sum + comp;
                if tail < tol * total.max(1e-300) {
                    return Ok(EvalResult {
                        value: total,
                        argmax_k: None,
                        terms_examined: next,
                        tail_bound: tail,
                        certified: true,
                    });
                }
            }
        }
        if k >= decay + MAX_SCAN_TERMS {
            return Err(Error::NotCertified(format!(
                "classical {} at n={n}, x={x}: no certificate after {k} terms",
                f.id()
            )));
        }
        k = next;
    }
}
