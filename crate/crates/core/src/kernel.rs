//! Baskakov basis weights in the logarithmic domain.
//!
//! The basis weight is `b_{n,k}(x) = C(n+k-1, k) x^k / (1+x)^(n+k)`. Binomial
//! coefficients overflow `f64` once `n + k` passes roughly 170, so every
//! quantity here is carried as a logarithm and only exponentiated once it is
//! known to be a bounded ratio.
//!
//! Ratios `m_{k,n,j}(x) = b_{n,k}(x) / b_{n,j}(x)` are accumulated as sums of
//! the log step ratios `ln(b_{n,i+1}/b_{n,i})` walking outward from `j`. The
//! walk keeps the absolute error of `ln m` proportional to `|k - j|` ulps of
//! O(1) quantities instead of the ulp of `lgamma(n + k)`, which is what a
//! plain difference of log-gamma values would cost.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{domain, Error, Result};

/// Beyond this distance from `j` the ratio falls back to a log-gamma difference.
const WALK_LIMIT: u64 = 1 << 16;

/// A nonnegative real stored as its natural logarithm.
///
/// `log_value == -inf` represents exactly zero.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct LogWeight(f64);

impl LogWeight {
    pub const ZERO: LogWeight = LogWeight(f64::NEG_INFINITY);
    pub const ONE: LogWeight = LogWeight(0.0);

    /// Wraps a log value. `NaN` and `+inf` are rejected.
    pub fn from_log(log_value: f64) -> Result<Self> {
        if log_value.is_nan() || log_value == f64::INFINITY {
            return Err(domain(format!("invalid log weight {log_value}")));
        }
        Ok(LogWeight(log_value))
    }

    pub fn from_linear(weight: f64) -> Result<Self> {
        if !(weight >= 0.0) || !weight.is_finite() {
            return Err(domain(format!(
                "weight must be finite and >= 0, got {weight}"
            )));
        }
        Ok(LogWeight(weight.ln()))
    }

    #[inline]
    pub fn log_value(self) -> f64 {
        self.0
    }

    /// The represented weight `exp(log_value)`.
    #[inline]
    pub fn value(self) -> f64 {
        self.0.exp()
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// `self / other` in the linear domain. Returns `None` when `other` is zero.
    pub fn ratio(self, other: LogWeight) -> Option<f64> {
        if other.is_zero() {
            None
        } else if self.is_zero() {
            Some(0.0)
        } else {
            Some((self.0 - other.0).exp())
        }
    }
}

/// Product of weights, computed as a sum of logs.
impl std::ops::Mul for LogWeight {
    type Output = LogWeight;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, other: LogWeight) -> LogWeight {
        LogWeight(self.0 + other.0)
    }
}

impl PartialOrd for LogWeight {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(&other.0)
    }
}

impl fmt::Debug for LogWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogWeight(ln={}, w={})", self.0, self.value())
    }
}

/// The index tuple used throughout the kernel and the lemma sweeps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelParams {
    pub n: u64,
    pub k: u64,
    pub j: u64,
    pub x: f64,
}

impl fmt::Display for KernelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n={} k={} j={} x={:.17e}",
            self.n, self.k, self.j, self.x
        )
    }
}

fn check_x(x: f64) -> Result<()> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain(format!("x must be finite and >= 0, got {x}")));
    }
    Ok(())
}

/// `ln C(a, b)`, exact-then-rounded while the coefficient fits in 53 bits.
pub fn log_binomial(a: u64, b: u64) -> f64 {
    if b > a {
        return f64::NEG_INFINITY;
    }
    let b = b.min(a - b);
    if b == 0 {
        return 0.0;
    }
    let mut c: u128 = 1;
    let mut exact = true;
    for i in 0..b {
        match c.checked_mul(u128::from(a - i)) {
            Some(p) if p < (1u128 << 100) => c = p / u128::from(i + 1),
            _ => {
                exact = false;
                break;
            }
        }
    }
    if exact && c < (1u128 << 53) {
        return (c as f64).ln();
    }
    let (a, b) = (a as f64, b as f64);
    libm::lgamma(a + 1.0) - libm::lgamma(b + 1.0) - libm::lgamma(a - b + 1.0)
}

/// `ln(x / (1 + x))` for `x > 0`, using whichever form loses least.
#[inline]
pub(crate) fn log_odds(x: f64) -> f64 {
    if x < 1.0 {
        x.ln() - x.ln_1p()
    } else {
        -(1.0 / x).ln_1p()
    }
}

/// `ln(b_{n,k+1}(x) / b_{n,k}(x)) = ln((n+k)/(k+1)) + ln(x/(1+x))`.
#[inline]
pub(crate) fn log_step(n: u64, k: u64, log_odds: f64) -> f64 {
    ((n - 1) as f64 / (k + 1) as f64).ln_1p() + log_odds
}

/// `ln b_{n,k}(x)` via log-gamma binomials.
pub fn log_basis_weight(n: u64, k: u64, x: f64) -> Result<LogWeight> {
    if n == 0 {
        return Err(domain("basis weight needs n >= 1"));
    }
    check_x(x)?;
    if x == 0.0 {
        return Ok(if k == 0 {
            LogWeight::ONE
        } else {
            LogWeight::ZERO
        });
    }
    let lc = log_binomial(n + k - 1, k);
    let kf = k as f64;
    let lw = lc + kf * x.ln() - (n as f64 + kf) * x.ln_1p();
    Ok(LogWeight(lw))
}

/// The index `j` with `x` in `[j/(n-1), (j+1)/(n-1)]`; endpoint ties resolve to the floor.
pub fn interval_index(n: u64, x: f64) -> Result<u64> {
    if n < 2 {
        return Err(domain("interval index needs n >= 2"));
    }
    check_x(x)?;
    let t = ((n - 1) as f64 * x).floor();
    if t >= u64::MAX as f64 {
        return Err(domain(format!("x = {x} is too large for n = {n}")));
    }
    Ok(t as u64)
}

/// First `k` from which `b_{n,k}(x)` is nonincreasing in `k`:
/// `max(0, ceil(n x - x - 1))`.
///
/// The step ratio equals one exactly when `(n-1)x - 1` is an integer and
/// `k` equals it; past that the weights strictly decrease.
pub fn weight_decay_start(n: u64, x: f64) -> Result<u64> {
    if n == 0 {
        return Err(domain("decay start needs n >= 1"));
    }
    check_x(x)?;
    let t = ((n - 1) as f64 * x - 1.0).ceil();
    if t <= 0.0 {
        return Ok(0);
    }
    if t >= u64::MAX as f64 {
        return Err(domain(format!("x = {x} is too large for n = {n}")));
    }
    Ok(t as u64)
}

/// Walks `ln m_{k,n,j}(x)` outward from `k = j`.
#[derive(Clone, Copy, Debug)]
pub struct RatioWalk {
    n: u64,
    j: u64,
    lq: f64,
}

impl RatioWalk {
    /// Requires `n >= 1` and `x > 0`.
    pub fn new(n: u64, j: u64, x: f64) -> Result<Self> {
        if n == 0 {
            return Err(domain("ratio walk needs n >= 1"));
        }
        check_x(x)?;
        if x == 0.0 {
            return Err(domain("ratio walk needs x > 0"));
        }
        Ok(RatioWalk {
            n,
            j,
            lq: log_odds(x),
        })
    }

    pub fn log_odds(&self) -> f64 {
        self.lq
    }

    #[inline]
    pub fn log_step(&self, k: u64) -> f64 {
        log_step(self.n, k, self.lq)
    }

    /// `ln m_{k,n,j}` by direct summation of steps between `j` and `k`.
    pub fn log_ratio(&self, k: u64) -> f64 {
        match k.cmp(&self.j) {
            Ordering::Equal => 0.0,
            Ordering::Greater => (self.j..k).fold(0.0, |acc, i| acc + self.log_step(i)),
            Ordering::Less => (k..self.j).rev().fold(0.0, |acc, i| acc - self.log_step(i)),
        }
    }

    /// `(k, ln m_k)` for `k = j, j+1, ...`.
    pub fn up(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        let mut k = self.j;
        let mut acc = 0.0;
        std::iter::from_fn(move || {
            let out = (k, acc);
            acc += self.log_step(k);
            k += 1;
            Some(out)
        })
    }

    /// `(k, ln m_k)` for `k = j, j-1, ..., 0`.
    pub fn down(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        let mut k = Some(self.j);
        let mut acc = 0.0;
        std::iter::from_fn(move || {
            let cur = k?;
            let out = (cur, acc);
            if cur == 0 {
                k = None;
            } else {
                acc -= self.log_step(cur - 1);
                k = Some(cur - 1);
            }
            Some(out)
        })
    }
}

/// `m_{k,n,j}(x) = b_{n,k}(x) / b_{n,j}(x)`, with `m_{0,n,0}(0) = 1` and
/// `m_{k,n,0}(0) = 0` for `k >= 1`.
pub fn weight_ratio_m(n: u64, k: u64, j: u64, x: f64) -> Result<f64> {
    if n < 2 {
        return Err(domain("m-ratio needs n >= 2"));
    }
    check_x(x)?;
    if x == 0.0 {
        return Ok(if k == 0 { 1.0 } else { 0.0 });
    }
    let d = k.abs_diff(j);
    let lm = if d <= WALK_LIMIT {
        RatioWalk::new(n, j, x)?.log_ratio(k)
    } else {
        let lc = log_binomial(n + k - 1, k) - log_binomial(n + j - 1, j);
        lc + (k as f64 - j as f64) * log_odds(x)
    };
    Ok(lm.exp())
}

/// The row `m_{0..=k_max, n, j}(x)`, bit-identical to repeated
/// [`weight_ratio_m`] calls while `|k - j|` stays within the walk range.
pub fn ratio_row(n: u64, j: u64, x: f64, k_max: u64) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(domain("m-ratio needs n >= 2"));
    }
    check_x(x)?;
    if x == 0.0 {
        return Ok((0..=k_max)
            .map(|k| if k == 0 { 1.0 } else { 0.0 })
            .collect());
    }
    let walk = RatioWalk::new(n, j, x)?;
    let mut row = vec![0.0; k_max as usize + 1];
    for (k, lm) in walk.down() {
        if k <= k_max {
            row[k as usize] = lm.exp();
        }
    }
    for (k, lm) in walk.up().skip(1) {
        if k > k_max {
            break;
        }
        row[k as usize] = lm.exp();
    }
    Ok(row)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MTermKind {
    /// `m |k/n - x|`
    Plain,
    /// `m (k/(n-1) - x)`, for `k >= n(j+1)/(n-1)`
    UpperBar,
    /// `m (x - k/(n-1))`, for `k <= n j/(n+1)`
    LowerBar,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MTerm {
    pub kind: MTermKind,
    pub value: f64,
}

/// `k >= n (j+1) / (n-1)`, in exact integer arithmetic.
pub fn upper_bar_admissible(n: u64, k: u64, j: u64) -> bool {
    n >= 2 && u128::from(k) * u128::from(n - 1) >= u128::from(n) * u128::from(j + 1)
}

/// `k >= n (j+1) / (n-2)`, in exact integer arithmetic.
pub fn upper_bar_doubling_admissible(n: u64, k: u64, j: u64) -> bool {
    n >= 3 && u128::from(k) * u128::from(n - 2) >= u128::from(n) * u128::from(j + 1)
}

/// `k <= n j / (n+1)`, in exact integer arithmetic.
pub fn lower_bar_admissible(n: u64, k: u64, j: u64) -> bool {
    u128::from(k) * u128::from(n + 1) <= u128::from(n) * u128::from(j)
}

/// The distance factor of an M-term, clamped at zero.
#[inline]
pub(crate) fn m_factor(kind: MTermKind, n: u64, k: u64, x: f64) -> f64 {
    let kf = k as f64;
    match kind {
        MTermKind::Plain => (kf / n as f64 - x).abs(),
        MTermKind::UpperBar => (kf / (n - 1) as f64 - x).max(0.0),
        MTermKind::LowerBar => (x - kf / (n - 1) as f64).max(0.0),
    }
}

/// `M`, `M̄` or `M̲` for `(n, k, j, x)`.
pub fn m_term(kind: MTermKind, n: u64, k: u64, j: u64, x: f64) -> Result<MTerm> {
    if n < 3 {
        return Err(Error::Precondition(format!("M-terms need n >= 3, got {n}")));
    }
    check_x(x)?;
    let pos = (n - 1) as f64 * x;
    let slack = 1e-9 * (j as f64).max(1.0);
    if pos < j as f64 - slack || pos > (j + 1) as f64 + slack {
        return Err(Error::Precondition(format!(
            "x = {x} is not in [{j}/(n-1), {}/(n-1)] for n = {n}",
            j + 1
        )));
    }
    match kind {
        MTermKind::UpperBar if !upper_bar_admissible(n, k, j) => {
            return Err(Error::Precondition(format!(
                "upper_bar needs k >= n(j+1)/(n-1); got n={n} k={k} j={j}"
            )))
        }
        MTermKind::LowerBar if !lower_bar_admissible(n, k, j) => {
            return Err(Error::Precondition(format!(
                "lower_bar needs k <= n j/(n+1); got n={n} k={k} j={j}"
            )))
        }
        _ => {}
    }
    let m = weight_ratio_m(n, k, j, x)?;
    Ok(MTerm {
        kind,
        value: m * m_factor(kind, n, k, x),
    })
}
