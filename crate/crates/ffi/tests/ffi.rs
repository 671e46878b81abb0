use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use disclosure_ffi::*;

fn crra(gamma: f64, rho: f64) -> *mut DsModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { ds_crra_new(gamma, rho, 0.5, 0.5, 1.0, 2.0, &mut m) }, DsStatus::Ok);
    m
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ds_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn crra_best_response_and_value() {
    let m = crra(0.0, 0.0);
    let (s, p) = ([1.0], [1.0]);
    let (mut a, mut v) = (0.0, 0.0);
    unsafe {
        assert_eq!(ds_best_response(m, s.as_ptr(), p.as_ptr(), 1, &mut a), DsStatus::Ok);
        assert_eq!(ds_sender_value(m, s.as_ptr(), p.as_ptr(), 1, &mut v), DsStatus::Ok);
        ds_model_free(m);
    }
    assert!((a - 0.0625).abs() < 1e-10);
    assert!((v - 0.125).abs() < 1e-10);
}

#[test]
fn conditions_and_oracle_agree_on_suboptimal_crra() {
    let m = crra(2.0, 0.0);
    let mut weak = DsConditionResult { verdict: DsVerdict::Vacuous, min_margin: 0.0, margin_tol: 0.0, pairs_tested: 0 };
    let mut sub = DsSuboptimality { found: 0, low_state: 0.0, high_state: 0.0 };
    let mut env = DsEnvelope {
        verdict: DsEnvelopeVerdict::FullDisclosureOptimal,
        margin: 0.0,
        envelope_value: 0.0,
        full_disclosure_value: 0.0,
        pooled_value: 0.0,
    };
    let support = [1.0, 2.0];
    unsafe {
        assert_eq!(ds_check_weak(m, 21, 41, &mut weak), DsStatus::Ok);
        assert_eq!(ds_check_suboptimality(m, 21, 41, support.as_ptr(), 2, &mut sub), DsStatus::Ok);
        assert_eq!(ds_concavify_2state(m, 1.0, 2.0, 0.5, 201, &mut env), DsStatus::Ok);
        ds_model_free(m);
    }
    assert_eq!(weak.verdict, DsVerdict::Violated);
    assert_eq!((sub.found, sub.low_state, sub.high_state), (1, 2.0, 1.0));
    assert_eq!(env.verdict, DsEnvelopeVerdict::FullDisclosureSuboptimal);
    assert!(env.margin > 0.0);
}

#[test]
fn crawford_sobel_split_and_ratio() {
    let mut m = ptr::null_mut();
    let mut split = DsBinarySplit {
        low_state: 0.0,
        high_state: 0.0,
        p_low: 0.0,
        a_pool: 0.0,
        a_low: 0.0,
        a_high: 0.0,
        k: 0.0,
        gain: 0.0,
        effort_delta: 0.0,
    };
    let mut r = 0.0;
    let mut d = DsConditionResult { verdict: DsVerdict::Vacuous, min_margin: 0.0, margin_tol: 0.0, pairs_tested: 0 };
    unsafe {
        assert_eq!(ds_quadratic_cs_new(0.1, 0.0, 1.0, &mut m), DsStatus::Ok);
        assert_eq!(ds_ratio(m, 0.5, 0.3, &mut r), DsStatus::Ok);
        assert_eq!(ds_check_derivable(m, 11, 21, &mut d), DsStatus::Ok);
        ds_model_free(m);
        assert_eq!(ds_quadratic_cs_new(0.0, 0.0, 1.0, &mut m), DsStatus::Ok);
        assert_eq!(ds_binary_split_gain(m, 0.0, 1.0, 0.5, &mut split), DsStatus::Ok);
        ds_model_free(m);
    }
    assert!((r - 0.1).abs() < 1e-12);
    assert!(matches!(d.verdict, DsVerdict::HoldsStrictly | DsVerdict::HoldsWeakly));
    assert!((split.gain - 0.25).abs() < 1e-12);
    assert!((split.k + 0.5).abs() < 1e-12);
}

#[test]
fn errors_map_to_status_codes() {
    let mut m = ptr::null_mut();
    unsafe {
        assert_eq!(ds_crra_new(1.0, 0.0, 0.5, 0.5, 1.0, 2.0, &mut m), DsStatus::InvalidParams);
        assert!(m.is_null());
        assert!(last_error().contains("invalid parameters"));
        assert_eq!(ds_quadratic_cs_new(0.0, 1.0, 0.0, &mut m), DsStatus::DomainError);
        let mut a = 0.0;
        assert_eq!(ds_ratio(ptr::null(), 0.5, 0.5, &mut a), DsStatus::NullPointer);
        let mut r = DsRegime::Optimal;
        assert_eq!(ds_crra_regime(0.5, 0.8, &mut r), DsStatus::Ok);
        assert_eq!(r, DsRegime::Inconclusive);
        assert!(last_error().is_empty());
        assert_eq!(ds_crra_regime(0.5, 1.0, &mut r), DsStatus::InvalidParams);
        ds_model_free(ptr::null_mut());
    }
}

#[test]
fn version_matches_the_crate() {
    let v = unsafe { CStr::from_ptr(ds_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// Static library next to the test binary, if cargo produced one.
fn static_lib() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("libdisclosure_ffi.a");
    lib.exists().then_some(lib)
}

fn cc() -> Option<String> {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    Command::new(&cc).arg("--version").output().ok().filter(|o| o.status.success()).map(|_| cc)
}

#[test]
fn header_compiles_and_links_from_c() {
    let Some(cc) = cc() else {
        eprintln!("no C compiler; skipping");
        return;
    };
    let include = manifest_dir().join("include");
    let src = manifest_dir().join("tests/c/smoke.c");
    let syntax = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(&include)
        .arg(&src)
        .output()
        .unwrap();
    assert!(syntax.status.success(), "{}", String::from_utf8_lossy(&syntax.stderr));

    let Some(lib) = static_lib() else {
        eprintln!("static library not built; header checked only");
        return;
    };
    let tmp = tempfile::tempdir().unwrap();
    let exe = tmp.path().join("smoke");
    let build = Command::new(&cc)
        .arg("-I")
        .arg(&include)
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .output()
        .unwrap();
    assert!(build.status.success(), "{}", String::from_utf8_lossy(&build.stderr));
    let run = Command::new(Path::new(&exe)).output().unwrap();
    assert!(run.status.success(), "exit {:?}", run.status.code());
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("ok "));
}
