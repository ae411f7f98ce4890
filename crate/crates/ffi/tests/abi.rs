use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use maxprod_ffi::*;

fn get(id: &str) -> *mut MaxprodFunc {
    let id = CString::new(id).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { maxprod_func_get(id.as_ptr(), &mut out) },
        MaxprodStatus::Ok
    );
    assert!(!out.is_null());
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(maxprod_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn eval_matches_library() {
    let f = get("expneg");
    let mut out = MaxprodEval::default();
    let st = unsafe { maxprod_eval_max_product(f, 16, 0.7, 1e-12, &mut out) };
    assert_eq!(st, MaxprodStatus::Ok);
    let spec = maxprod::get_function("expneg").unwrap();
    let want = maxprod::eval_max_product(&spec, 16, 0.7, 1e-12).unwrap();
    assert_eq!(out.value, want.value);
    assert_eq!(out.argmax_k, want.argmax_k.unwrap());
    assert!(out.has_argmax && out.certified);

    let st = unsafe { maxprod_eval_classical(f, 16, 0.7, 1e-12, &mut out) };
    assert_eq!(st, MaxprodStatus::Ok);
    assert!(!out.has_argmax);
    unsafe { maxprod_func_free(f) };
}

#[test]
fn handles_compose_and_free() {
    let f = get("ratio");
    let g = get("e0");
    let mut h = ptr::null_mut();
    let st = unsafe { maxprod_func_combine(f, g, 2.0, 0.5, &mut h) };
    assert_eq!(st, MaxprodStatus::Ok);
    let mut v = 0.0;
    assert_eq!(
        unsafe { maxprod_func_eval(h, 1.0, &mut v) },
        MaxprodStatus::Ok
    );
    assert_eq!(v, 1.0);
    let id = unsafe { CStr::from_ptr(maxprod_func_id(h)) }
        .to_str()
        .unwrap()
        .to_owned();
    assert!(id.contains("ratio") && id.contains("e0"));

    let mut phi = ptr::null_mut();
    assert_eq!(
        unsafe { maxprod_func_phi(0.5, &mut phi) },
        MaxprodStatus::Ok
    );
    assert_eq!(
        unsafe { maxprod_func_eval(phi, 2.0, &mut v) },
        MaxprodStatus::Ok
    );
    assert_eq!(v, 1.5);

    unsafe {
        maxprod_func_free(h);
        maxprod_func_free(phi);
        maxprod_func_free(f);
        maxprod_func_free(g);
        maxprod_func_free(ptr::null_mut());
    }
}

#[test]
fn error_codes_and_messages() {
    let mut out = ptr::null_mut();
    let bad = CString::new("nope").unwrap();
    assert_eq!(
        unsafe { maxprod_func_get(bad.as_ptr(), &mut out) },
        MaxprodStatus::UnknownFunction
    );
    assert!(out.is_null());
    assert!(last_error().contains("nope"));

    assert_eq!(
        unsafe { maxprod_func_get(ptr::null(), &mut out) },
        MaxprodStatus::NullPointer
    );
    let invalid = [0xffu8 as std::ffi::c_char, 0];
    assert_eq!(
        unsafe { maxprod_func_get(invalid.as_ptr(), &mut out) },
        MaxprodStatus::InvalidUtf8
    );

    let mut e = MaxprodEval::default();
    assert_eq!(
        unsafe { maxprod_eval_phi_error(2, 0.5, 1e-12, &mut e) },
        MaxprodStatus::Domain
    );
    assert_eq!(
        unsafe { maxprod_eval_phi_error(8, 0.5, 1e-12, ptr::null_mut()) },
        MaxprodStatus::NullPointer
    );

    let mut v = 0.0;
    assert_eq!(
        unsafe { maxprod_envelope_rhs(2.0, 4, 3, &mut v) },
        MaxprodStatus::Hypothesis
    );
    let e2 = get("e2");
    assert_eq!(
        unsafe { maxprod_rhs_pointwise(e2, 0.5, 8, 2, &mut v) },
        MaxprodStatus::NoCertificate
    );
    assert_eq!(
        unsafe { maxprod_rhs_weighted(e2, 0.5, 8, 2, &mut v) },
        MaxprodStatus::NotWeighted
    );
    let mut m = MaxprodModulus::default();
    assert_eq!(
        unsafe { maxprod_weighted_modulus(e2, 0.1, 50.0, 4096, &mut m) },
        MaxprodStatus::NotWeighted
    );
    unsafe { maxprod_func_free(e2) };

    let ns = [8u64, 16, 32];
    let vs = [1.0, 0.5, 0.25];
    assert_eq!(
        unsafe { maxprod_empirical_order(ns.as_ptr(), vs.as_ptr(), 3, &mut v) },
        MaxprodStatus::Degenerate
    );
}

#[test]
fn kernel_and_bound_entry_points() {
    let mut w = 0.0;
    assert_eq!(
        unsafe { maxprod_log_basis_weight(3, 0, 1.0, &mut w) },
        MaxprodStatus::Ok
    );
    assert!((w.exp() - 0.125).abs() < 1e-15);
    let mut j = 0u64;
    assert_eq!(
        unsafe { maxprod_interval_index(5, 0.6, &mut j) },
        MaxprodStatus::Ok
    );
    assert_eq!(j, 2);
    let mut m = 0.0;
    assert_eq!(
        unsafe { maxprod_weight_ratio_m(5, 1, 4, 1.0, &mut m) },
        MaxprodStatus::Ok
    );
    assert!((m - 40.0 / 70.0).abs() < 1e-14);

    let mut h = MaxprodHypotheses::default();
    assert_eq!(
        unsafe { maxprod_hypotheses(2.0, 4, 3, &mut h) },
        MaxprodStatus::Ok
    );
    assert!(h.pow_cond && !h.j_cond && h.n_cond);

    let ratio = get("ratio");
    let mut mod_ = MaxprodModulus::default();
    assert_eq!(
        unsafe { maxprod_classical_modulus(ratio, 0.5, 20.0, 4096, &mut mod_) },
        MaxprodStatus::Ok
    );
    assert!(mod_.has_upper && (mod_.upper - 1.0 / 3.0).abs() < 1e-16);
    let mut r = 0.0;
    assert_eq!(
        unsafe { maxprod_rhs_pointwise(ratio, 0.6, 4, 2, &mut r) },
        MaxprodStatus::Ok
    );
    assert!((r - 2.5178).abs() < 1e-4);
    unsafe { maxprod_func_free(ratio) };

    let ns = [8u64, 16, 32, 64];
    let vs: Vec<f64> = ns.iter().map(|&n| 1.0 / (n - 1) as f64).collect();
    assert_eq!(
        unsafe { maxprod_empirical_order(ns.as_ptr(), vs.as_ptr(), 4, &mut r) },
        MaxprodStatus::Ok
    );
    assert!((r + 1.0).abs() < 1e-12);
}

#[test]
fn header_declares_every_entry_point() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/maxprod.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in [
        "maxprod_last_error",
        "maxprod_func_get",
        "maxprod_func_phi",
        "maxprod_func_combine",
        "maxprod_func_free",
        "maxprod_func_id",
        "maxprod_func_eval",
        "maxprod_eval_max_product",
        "maxprod_eval_classical",
        "maxprod_eval_phi_error",
        "maxprod_log_basis_weight",
        "maxprod_interval_index",
        "maxprod_weight_ratio_m",
        "maxprod_classical_modulus",
        "maxprod_weighted_modulus",
        "maxprod_hypotheses",
        "maxprod_envelope_rhs",
        "maxprod_rhs_pointwise",
        "maxprod_rhs_weighted",
        "maxprod_empirical_order",
        "typedef struct MaxprodFunc MaxprodFunc",
        "MAXPROD_STATUS_OK = 0",
    ] {
        assert!(text.contains(name), "{name} missing from header");
    }
}

/// Directory holding the built static library: the parent of `deps/`.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let lib = artifact_dir().join("libmaxprod_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !lib.exists() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!(
            "skipping C smoke test: no static library at {} or no {cc}",
            lib.display()
        );
        return;
    }
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let bin = std::env::temp_dir().join(format!("maxprod_smoke_{}", std::process::id()));
    let status = Command::new(&cc)
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&bin).output().unwrap();
    let _ = std::fs::remove_file(&bin);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
