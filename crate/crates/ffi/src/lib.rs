//! C ABI over the `maxprod` library.
//!
//! Functions are opaque-handle based and return a [`MaxprodStatus`]. Results
//! go through out-pointers, which are left untouched on failure. The message
//! for the most recent failure on the calling thread is available from
//! [`maxprod_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use maxprod::bounds::{self, hypothesis_51};
use maxprod::moduli::{classical_modulus, weighted_modulus_rho0, ModulusEstimate};
use maxprod::operators::EvalResult;
use maxprod::{Error, FuncSpec};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MaxprodStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Domain = 3,
    Precondition = 4,
    UnknownFunction = 5,
    NotCertified = 6,
    Hypothesis = 7,
    NoCertificate = 8,
    Unbounded = 9,
    NotWeighted = 10,
    Degenerate = 11,
    Panic = 12,
}

impl From<&Error> for MaxprodStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => MaxprodStatus::Domain,
            Error::Precondition(_) => MaxprodStatus::Precondition,
            Error::UnknownFunction { .. } => MaxprodStatus::UnknownFunction,
            Error::NotCertified(_) => MaxprodStatus::NotCertified,
            Error::Hypothesis(_) => MaxprodStatus::Hypothesis,
            Error::NoCertificate(_) => MaxprodStatus::NoCertificate,
            Error::Unbounded(_) => MaxprodStatus::Unbounded,
            Error::NotWeighted(_) => MaxprodStatus::NotWeighted,
            Error::Degenerate(_) => MaxprodStatus::Degenerate,
        }
    }
}

/// Opaque function handle. Free with [`maxprod_func_free`].
pub struct MaxprodFunc {
    spec: FuncSpec,
    id: CString,
}

impl MaxprodFunc {
    fn boxed(spec: FuncSpec) -> *mut MaxprodFunc {
        // registry ids and generated ids never contain NUL
        let id = CString::new(spec.id()).unwrap_or_default();
        Box::into_raw(Box::new(MaxprodFunc { spec, id }))
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MaxprodEval {
    pub value: f64,
    /// Meaningful only when `has_argmax` is set.
    pub argmax_k: u64,
    pub has_argmax: bool,
    pub terms_examined: u64,
    pub tail_bound: f64,
    pub certified: bool,
}

impl From<EvalResult> for MaxprodEval {
    fn from(r: EvalResult) -> Self {
        MaxprodEval {
            value: r.value,
            argmax_k: r.argmax_k.unwrap_or(0),
            has_argmax: r.argmax_k.is_some(),
            terms_examined: r.terms_examined,
            tail_bound: r.tail_bound,
            certified: r.certified,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MaxprodModulus {
    pub delta: f64,
    pub lower: f64,
    /// Meaningful only when `has_upper` is set.
    pub upper: f64,
    pub has_upper: bool,
    pub grid_points: usize,
    pub domain_max: f64,
}

impl From<ModulusEstimate> for MaxprodModulus {
    fn from(m: ModulusEstimate) -> Self {
        MaxprodModulus {
            delta: m.delta,
            lower: m.lower,
            upper: m.upper.unwrap_or(0.0),
            has_upper: m.upper.is_some(),
            grid_points: m.grid_points,
            domain_max: m.domain_max,
        }
    }
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct MaxprodHypotheses {
    pub pow_cond: bool,
    pub j_cond: bool,
    pub n_cond: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Message for the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn maxprod_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Utf8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> MaxprodStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => MaxprodStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            let status = MaxprodStatus::from(&e);
            set_last_error(e.to_string());
            status
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            MaxprodStatus::NullPointer
        }
        Ok(Err(Failure::Utf8)) => {
            set_last_error("function id is not valid UTF-8".into());
            MaxprodStatus::InvalidUtf8
        }
        Err(_) => {
            set_last_error("internal panic".into());
            MaxprodStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    out.write(v);
    Ok(())
}

/// Looks up a registry function by id.
///
/// # Safety
/// `id` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn maxprod_func_get(
    id: *const c_char,
    out: *mut *mut MaxprodFunc,
) -> MaxprodStatus {
    guard(|| {
        if id.is_null() {
            return Err(Failure::Null("id"));
        }
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let id = CStr::from_ptr(id).to_str().map_err(|_| Failure::Utf8)?;
        let spec = maxprod::get_function(id)?;
        write(out, MaxprodFunc::boxed(spec))
    })
}

/// `t -> |t - x0|`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maxprod_func_phi(x0: f64, out: *mut *mut MaxprodFunc) -> MaxprodStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        write(out, MaxprodFunc::boxed(maxprod::phi_at(x0)?))
    })
}

/// `t -> max(a f(t), b g(t))`. The inputs stay owned by the caller.
///
/// # Safety
/// `f` and `g` must be live handles and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn maxprod_func_combine(
    f: *const MaxprodFunc,
    g: *const MaxprodFunc,
    a: f64,
    b: f64,
    out: *mut *mut MaxprodFunc,
) -> MaxprodStatus {
    guard(|| {
        let f = deref(f, "f")?;
        let g = deref(g, "g")?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        let spec = maxprod::max_scale_combine(&f.spec, &g.spec, a, b)?;
        write(out, MaxprodFunc::boxed(spec))
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `f` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn maxprod_func_free(f: *mut MaxprodFunc) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// The handle's id; owned by the handle.
///
/// # Safety
/// `f` must be a live handle or null (which yields null).
#[no_mangle]
pub unsafe extern "C" fn maxprod_func_id(f: *const MaxprodFunc) -> *const c_char {
    f.as_ref().map_or(ptr::null(), |f| f.id.as_ptr())
}

/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn maxprod_func_eval(
    f: *const MaxprodFunc,
    x: f64,
    out: *mut f64,
) -> MaxprodStatus {
    guard(|| {
        let f = deref(f, "f")?;
        write(out, f.spec.eval(x))
    })
}

/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn maxprod_eval_max_product(
    f: *const MaxprodFunc,
    n: u64,
    x: f64,
    tol: f64,
    out: *mut MaxprodEval,
) -> MaxprodStatus {
    guard(|| {
        let f = deref(f, "f")?;
        let r = maxprod::eval_max_product(&f.spec, n, x, tol)?;
        write(out, r.into())
    })
}

/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn maxprod_eval_classical(
    f: *const MaxprodFunc,
    n: u64,
    x: f64,
    tol: f64,
    out: *mut MaxprodEval,
) -> MaxprodStatus {
    guard(|| {
        let f = deref(f, "f")?;
        let r = maxprod::eval_classical(&f.spec, n, x, tol)?;
        write(out, r.into())
    })
}

/// `E_n(x)`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maxprod_eval_phi_error(
    n: u64,
    x: f64,
    tol: f64,
    out: *mut MaxprodEval,
) -> MaxprodStatus {
    guard(|| write(out, maxprod::eval_phi_error(n, x, tol)?.into()))
}

/// `ln b_{n,k}(x)`; `-inf` for a zero weight.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maxprod_log_basis_weight(
    n: u64,
    k: u64,
    x: f64,
    out: *mut f64,
) -> MaxprodStatus {
    guard(|| write(out, maxprod::log_basis_weight(n, k, x)?.log_value()))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maxprod_interval_index(n: u64, x: f64, out: *mut u64) -> MaxprodStatus {
    guard(|| write(out, maxprod::interval_index(n, x)?))
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maxprod_weight_ratio_m(
    n: u64,
    k: u64,
    j: u64,
    x: f64,
    out: *mut f64,
) -> MaxprodStatus {
    guard(|| write(out, maxprod::weight_ratio_m(n, k, j, x)?))
}

/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn maxprod_classical_modulus(
    f: *const MaxprodFunc,
    delta: f64,
    domain_max: f64,
    grid_points: usize,
    out: *mut MaxprodModulus,
) -> MaxprodStatus {
    guard(|| {
        let f = deref(f, "f")?;
        let m = classical_modulus(&f.spec, delta, domain_max, grid_points)?;
        write(out, m.into())
    })
}

/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn maxprod_weighted_modulus(
    f: *const MaxprodFunc,
    delta: f64,
    domain_max: f64,
    grid_points: usize,
    out: *mut MaxprodModulus,
) -> MaxprodStatus {
    guard(|| {
        let f = deref(f, "f")?;
        let m = weighted_modulus_rho0(&f.spec, delta, domain_max, grid_points)?;
        write(out, m.into())
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maxprod_hypotheses(
    x: f64,
    n: u64,
    alpha: u32,
    out: *mut MaxprodHypotheses,
) -> MaxprodStatus {
    guard(|| {
        let h = hypothesis_51(x, n, alpha)?;
        write(
            out,
            MaxprodHypotheses {
                pow_cond: h.pow_cond,
                j_cond: h.j_cond,
                n_cond: h.n_cond,
            },
        )
    })
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn maxprod_envelope_rhs(
    x: f64,
    n: u64,
    alpha: u32,
    out: *mut f64,
) -> MaxprodStatus {
    guard(|| write(out, bounds::envelope_rhs(x, n, alpha)?))
}

/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn maxprod_rhs_pointwise(
    f: *const MaxprodFunc,
    x: f64,
    n: u64,
    alpha: u32,
    out: *mut f64,
) -> MaxprodStatus {
    guard(|| {
        let f = deref(f, "f")?;
        write(out, bounds::rhs_theorem51(&f.spec, x, n, alpha)?)
    })
}

/// # Safety
/// `f` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn maxprod_rhs_weighted(
    f: *const MaxprodFunc,
    x: f64,
    n: u64,
    alpha: u32,
    out: *mut f64,
) -> MaxprodStatus {
    guard(|| {
        let f = deref(f, "f")?;
        write(out, bounds::rhs_theorem61(&f.spec, x, n, alpha)?)
    })
}

/// Slope of `ln values[i]` against `ln(ns[i] - 1)`.
///
/// # Safety
/// `ns` and `values` must each point to `len` readable elements and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn maxprod_empirical_order(
    ns: *const u64,
    values: *const f64,
    len: usize,
    out: *mut f64,
) -> MaxprodStatus {
    guard(|| {
        if ns.is_null() {
            return Err(Failure::Null("ns"));
        }
        if values.is_null() {
            return Err(Failure::Null("values"));
        }
        let ns = std::slice::from_raw_parts(ns, len);
        let vs = std::slice::from_raw_parts(values, len);
        let series: Vec<(u64, f64)> = ns.iter().copied().zip(vs.iter().copied()).collect();
        write(out, bounds::empirical_order(&series)?)
    })
}
