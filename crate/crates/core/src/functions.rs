//! Registry of nonnegative test functions on `[0, inf)` with the metadata
//! that certified evaluation and modulus bounds rely on.

use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Error, Result};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Growth envelope `f(t) <= coeff * (1 + t)^degree` for all `t >= 0`.
///
/// Degree zero means `f` is bounded by `coeff`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Growth {
    pub coeff: f64,
    pub degree: u32,
}

impl Growth {
    pub fn bounded(sup: f64) -> Self {
        Growth {
            coeff: sup,
            degree: 0,
        }
    }

    #[inline]
    pub fn at(&self, t: f64) -> f64 {
        self.coeff * (1.0 + t).powi(self.degree as i32)
    }
}

/// A registered function together with its certified metadata.
#[derive(Clone)]
pub struct FuncSpec {
    id: String,
    eval: RealFn,
    growth: Growth,
    lipschitz: Option<f64>,
    modulus: Option<RealFn>,
    in_c0_rho0: bool,
}

impl FuncSpec {
    pub fn id(&self) -> &str {
        &self.id
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// Finite supremum, or `None` for unbounded functions.
    pub fn sup_bound(&self) -> Option<f64> {
        (self.growth.degree == 0).then_some(self.growth.coeff)
    }

    pub fn is_bounded(&self) -> bool {
        self.growth.degree == 0
    }

    pub fn growth(&self) -> Growth {
        self.growth
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    /// Closed-form modulus of continuity. Exact for registry entries; an
    /// upper bound for combinations built by [`max_scale_combine`] and
    /// [`abs_diff`].
    pub fn analytic_modulus(&self, delta: f64) -> Option<f64> {
        self.modulus.as_ref().map(|w| w(delta))
    }

    pub fn has_analytic_modulus(&self) -> bool {
        self.modulus.is_some()
    }

    /// Membership in `C⁰_ρ₀` with `ρ₀(x) = 1 + x²`.
    pub fn in_c0_rho0(&self) -> bool {
        self.in_c0_rho0
    }
}

impl fmt::Debug for FuncSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FuncSpec")
            .field("id", &self.id)
            .field("growth", &self.growth)
            .field("lipschitz", &self.lipschitz)
            .field("analytic_modulus", &self.modulus.is_some())
            .field("in_c0_rho0", &self.in_c0_rho0)
            .finish()
    }
}

pub const REGISTRY_IDS: [&str; 7] = ["e0", "e1", "e2", "ratio", "expneg", "vee1", "bump"];

fn spec(
    id: &str,
    eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
    growth: Growth,
    lipschitz: Option<f64>,
    modulus: Option<RealFn>,
    in_c0_rho0: bool,
) -> FuncSpec {
    FuncSpec {
        id: id.to_string(),
        eval: Arc::new(eval),
        growth,
        lipschitz,
        modulus,
        in_c0_rho0,
    }
}

/// Looks up a built-in function.
///
/// `e2` is reported outside `C⁰_ρ₀`: its ratio to `1 + x²` tends to one, not
/// zero, and the weighted bounds here are only exercised on bounded members.
pub fn get_function(id: &str) -> Result<FuncSpec> {
    let f = match id {
        "e0" => spec(
            id,
            |_| 1.0,
            Growth::bounded(1.0),
            Some(0.0),
            Some(Arc::new(|_| 0.0)),
            true,
        ),
        "e1" => spec(
            id,
            |x| x,
            Growth {
                coeff: 1.0,
                degree: 1,
            },
            Some(1.0),
            Some(Arc::new(|d| d)),
            true,
        ),
        "e2" => spec(
            id,
            |x| x * x,
            Growth {
                coeff: 1.0,
                degree: 2,
            },
            None,
            None,
            false,
        ),
        // sup of f(x+d) - f(x) = d / ((1+x)(1+x+d)) is at x = 0
        "ratio" => spec(
            id,
            |x| x / (1.0 + x),
            Growth::bounded(1.0),
            Some(1.0),
            Some(Arc::new(|d| d / (1.0 + d))),
            true,
        ),
        "expneg" => spec(
            id,
            |x| (-x).exp(),
            Growth::bounded(1.0),
            Some(1.0),
            Some(Arc::new(|d: f64| -(-d).exp_m1())),
            true,
        ),
        "vee1" => spec(
            id,
            |x| (x - 1.0).abs().min(1.0),
            Growth::bounded(1.0),
            Some(1.0),
            Some(Arc::new(|d: f64| d.min(1.0))),
            true,
        ),
        // |f'| peaks at x = 1/sqrt(3) with value 9 / (8 sqrt 3)
        "bump" => spec(
            id,
            |x| 1.0 / (1.0 + x * x),
            Growth::bounded(1.0),
            Some(9.0 / (8.0 * 3f64.sqrt())),
            None,
            true,
        ),
        _ => {
            return Err(Error::UnknownFunction {
                id: id.to_string(),
                known: REGISTRY_IDS.iter().map(|s| s.to_string()).collect(),
            })
        }
    };
    Ok(f)
}

/// `t -> |t - x0|`.
pub fn phi_at(x0: f64) -> Result<FuncSpec> {
    if !(x0 >= 0.0) || !x0.is_finite() {
        return Err(domain(format!(
            "phi centre must be finite and >= 0, got {x0}"
        )));
    }
    Ok(spec(
        &format!("phi@{x0}"),
        move |t| (t - x0).abs(),
        Growth {
            coeff: x0.max(1.0),
            degree: 1,
        },
        Some(1.0),
        Some(Arc::new(|d| d)),
        true,
    ))
}

fn check_coeff(c: f64) -> Result<()> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(domain(format!(
            "scale factors must be finite and >= 0, got {c}"
        )));
    }
    Ok(())
}

/// `x -> max(a f(x), b g(x))`. Terms with a zero factor are dropped, so their
/// metadata does not constrain the result.
pub fn max_scale_combine(f: &FuncSpec, g: &FuncSpec, a: f64, b: f64) -> Result<FuncSpec> {
    check_coeff(a)?;
    check_coeff(b)?;
    let id = format!("max({a}*{},{b}*{})", f.id, g.id);
    let active: Vec<(f64, &FuncSpec)> = [(a, f), (b, g)]
        .into_iter()
        .filter(|(c, _)| *c > 0.0)
        .collect();

    let growth = active.iter().fold(
        Growth {
            coeff: 0.0,
            degree: 0,
        },
        |acc, (c, h)| Growth {
            coeff: acc.coeff.max(c * h.growth.coeff),
            degree: acc.degree.max(h.growth.degree),
        },
    );
    let lipschitz = active
        .iter()
        .try_fold(0.0f64, |acc, (c, h)| h.lipschitz.map(|l| acc.max(c * l)));
    let moduli: Option<Vec<(f64, RealFn)>> = active
        .iter()
        .map(|(c, h)| h.modulus.clone().map(|w| (*c, w)))
        .collect();
    let modulus: Option<RealFn> = moduli.map(|ws| {
        Arc::new(move |d: f64| ws.iter().fold(0.0f64, |acc, (c, w)| acc.max(c * w(d)))) as RealFn
    });
    let in_c0 = active.iter().all(|(_, h)| h.in_c0_rho0);

    let (fe, ge) = (f.eval.clone(), g.eval.clone());
    let eval = move |x: f64| {
        let l = if a > 0.0 { a * fe(x) } else { 0.0 };
        let r = if b > 0.0 { b * ge(x) } else { 0.0 };
        l.max(r)
    };
    Ok(spec(&id, eval, growth, lipschitz, modulus, in_c0))
}

/// `x -> lambda f(x)`.
pub fn scaled(f: &FuncSpec, lambda: f64) -> Result<FuncSpec> {
    let mut s = max_scale_combine(f, f, lambda, 0.0)?;
    s.id = format!("{lambda}*{}", f.id);
    Ok(s)
}

/// `x -> |f(x) - g(x)|`.
pub fn abs_diff(f: &FuncSpec, g: &FuncSpec) -> FuncSpec {
    // both nonnegative, so |f - g| <= max(f, g)
    let growth = Growth {
        coeff: f.growth.coeff.max(g.growth.coeff),
        degree: f.growth.degree.max(g.growth.degree),
    };
    let lipschitz = f.lipschitz.zip(g.lipschitz).map(|(a, b)| a + b);
    let modulus: Option<RealFn> = f
        .modulus
        .clone()
        .zip(g.modulus.clone())
        .map(|(wf, wg)| Arc::new(move |d: f64| wf(d) + wg(d)) as RealFn);
    let (fe, ge) = (f.eval.clone(), g.eval.clone());
    spec(
        &format!("|{}-{}|", f.id, g.id),
        move |x| (fe(x) - ge(x)).abs(),
        growth,
        lipschitz,
        modulus,
        f.in_c0_rho0 && g.in_c0_rho0,
    )
}
