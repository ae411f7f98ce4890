//! Classical and `ρ₀`-weighted moduli of continuity.
//!
//! Grid suprema are always valid lower bounds. Upper bounds come only from
//! certified metadata (closed-form modulus or Lipschitz constant) plus, for the
//! weighted modulus, a grid-rounding argument: moving a pair `(x, x+h)` to the
//! grid costs at most `2 L s` in the increment, and rounding the right end
//! down can only shrink `ρ₀(x+h)`.

use std::collections::VecDeque;

use crate::error::{domain, Error, Result};
use crate::functions::FuncSpec;

pub const DEFAULT_CLASSICAL_DOMAIN: f64 = 20.0;
pub const DEFAULT_WEIGHTED_DOMAIN: f64 = 50.0;
pub const DEFAULT_GRID_POINTS: usize = 4096;
pub const MIN_GRID_POINTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModulusEstimate {
    pub delta: f64,
    pub lower: f64,
    pub upper: Option<f64>,
    pub grid_points: usize,
    pub domain_max: f64,
}

impl ModulusEstimate {
    pub fn spacing(&self) -> f64 {
        self.domain_max / (self.grid_points - 1) as f64
    }
}

/// `ρ₀(x) = 1 + x²`.
#[inline]
pub fn rho0(x: f64) -> f64 {
    1.0 + x * x
}

/// Certified upper bound for the classical modulus from metadata alone.
pub fn modulus_upper(f: &FuncSpec, delta: f64) -> Option<f64> {
    f.analytic_modulus(delta)
        .or_else(|| f.lipschitz().map(|l| l * delta))
}

fn check_grid(delta: f64, domain_max: f64, grid_points: usize) -> Result<()> {
    if grid_points < MIN_GRID_POINTS {
        return Err(domain(format!(
            "grid_points must be >= {MIN_GRID_POINTS}, got {grid_points}"
        )));
    }
    if !(domain_max > 0.0) || !domain_max.is_finite() {
        return Err(domain(format!(
            "domain_max must be finite and > 0, got {domain_max}"
        )));
    }
    if !(delta > 0.0) || delta > domain_max {
        return Err(domain(format!(
            "delta must lie in (0, domain_max], got {delta}"
        )));
    }
    Ok(())
}

/// Largest `w` with `w * spacing <= delta`.
fn window(delta: f64, spacing: f64) -> usize {
    let mut w = (delta / spacing).floor() as usize;
    while w > 0 && w as f64 * spacing > delta {
        w -= 1;
    }
    while (w + 1) as f64 * spacing <= delta {
        w += 1;
    }
    w
}

/// `max_r max_{r-w <= l <= r} |v_r - v_l| / weight(r)` with monotone deques.
fn windowed_increment_sup(values: &[f64], w: usize, weight: impl Fn(usize) -> f64) -> f64 {
    let mut maxq: VecDeque<usize> = VecDeque::new();
    let mut minq: VecDeque<usize> = VecDeque::new();
    let mut best = 0.0f64;
    for (r, &v) in values.iter().enumerate() {
        while maxq.back().is_some_and(|&i| values[i] <= v) {
            maxq.pop_back();
        }
        maxq.push_back(r);
        while minq.back().is_some_and(|&i| values[i] >= v) {
            minq.pop_back();
        }
        minq.push_back(r);
        let lo = r.saturating_sub(w);
        while maxq.front().is_some_and(|&i| i < lo) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&i| i < lo) {
            minq.pop_front();
        }
        let hi = values[maxq[0]];
        let low = values[minq[0]];
        let inc = (hi - v).max(v - low);
        best = best.max(inc / weight(r));
    }
    best
}

fn sample_grid(f: &FuncSpec, domain_max: f64, grid_points: usize) -> (Vec<f64>, f64) {
    let s = domain_max / (grid_points - 1) as f64;
    let v = (0..grid_points).map(|i| f.eval(i as f64 * s)).collect();
    (v, s)
}

/// `ω(f, δ)` estimated on `[0, domain_max]`.
pub fn classical_modulus(
    f: &FuncSpec,
    delta: f64,
    domain_max: f64,
    grid_points: usize,
) -> Result<ModulusEstimate> {
    check_grid(delta, domain_max, grid_points)?;
    let (values, s) = sample_grid(f, domain_max, grid_points);
    let lower = windowed_increment_sup(&values, window(delta, s), |_| 1.0);
    Ok(ModulusEstimate {
        delta,
        lower,
        upper: modulus_upper(f, delta),
        grid_points,
        domain_max,
    })
}

/// `ω_ρ₀(f, δ) = sup |f(x+h) - f(x)| / ρ₀(x+h)` over `x >= 0`, `0 <= h <= δ`.
pub fn weighted_modulus_rho0(
    f: &FuncSpec,
    delta: f64,
    domain_max: f64,
    grid_points: usize,
) -> Result<ModulusEstimate> {
    if !f.in_c0_rho0() {
        return Err(Error::NotWeighted(f.id().to_string()));
    }
    check_grid(delta, domain_max, grid_points)?;
    let (values, s) = sample_grid(f, domain_max, grid_points);
    let lower = windowed_increment_sup(&values, window(delta, s), |r| rho0(r as f64 * s));

    // right ends beyond domain_max: |f(y) - f(x)| <= 2 sup, ρ₀(y) > 1 + D²
    let grid_upper = f.lipschitz().zip(f.sup_bound()).map(|(l, sup)| {
        let tail = 2.0 * sup / rho0(domain_max);
        (lower + 2.0 * l * s).max(tail)
    });
    let upper = match (modulus_upper(f, delta), grid_upper) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    Ok(ModulusEstimate {
        delta,
        lower,
        upper,
        grid_points,
        domain_max,
    })
}
