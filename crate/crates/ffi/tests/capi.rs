use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use sss_ffi::*;

fn last_error() -> String {
    let p = sss_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn parabola_profile_round_trip() {
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(sss_profile_new(2, 2.0, -1, &mut p), SssStatus::Ok);
        assert!(!p.is_null());
        let mut f = 0.0;
        assert_eq!(sss_profile_eval(p, 0.5, &mut f, ptr::null_mut()), SssStatus::Ok);
        // p⁻(s) = -(1 - s²/N) on [0, √N].
        assert!((f + 1.0 - 0.125).abs() < 1e-10, "{f}");
        let mut buf = [0.0; 8];
        let mut n = 0;
        assert_eq!(sss_profile_zeros(p, buf.as_mut_ptr(), buf.len(), &mut n), SssStatus::Ok);
        assert!(n >= 1 && n == sss_profile_zero_count(p));
        assert!((buf[0] - 2f64.sqrt()).abs() < 1e-10);
        sss_profile_free(p);
    }
}

#[test]
fn eigen_profile_has_algebraic_tail() {
    let mut alpha = 0.0;
    unsafe {
        assert_eq!(sss_exponent(1, 1, 1, &mut alpha), SssStatus::Ok);
        assert!(alpha > 2.0);
        let mut p = ptr::null_mut();
        assert_eq!(sss_profile_new(1, alpha, 1, &mut p), SssStatus::Ok);
        let mut kind = SssTailKind::Truncated;
        assert_eq!(sss_profile_tail_kind(p, &mut kind), SssStatus::Ok);
        assert_eq!(kind, SssTailKind::Algebraic);
        assert_eq!(sss_profile_zero_count(p), 1);
        assert!(sss_profile_end(p).is_infinite());
        sss_profile_free(p);
    }
}

#[test]
fn table_matches_single_exponent() {
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(sss_exponent_table_new(1, 2, &mut t), SssStatus::Ok);
        let (mut a, mut b) = (0.0, 0.0);
        assert_eq!(sss_exponent_table_alpha(t, -1, 2, &mut a), SssStatus::Ok);
        assert_eq!(sss_exponent(1, -1, 2, &mut b), SssStatus::Ok);
        assert_eq!(a, b);
        assert_eq!(sss_exponent_table_alpha(t, -1, 3, &mut a), SssStatus::OutOfRange);
        sss_exponent_table_free(t);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut alpha = 0.0;
        assert_eq!(sss_exponent(1, 2, 1, &mut alpha), SssStatus::InvalidArgument);
        assert!(last_error().contains("sign"));
        assert_eq!(sss_exponent(1, 1, 0, &mut alpha), SssStatus::OutOfRange);
        assert_eq!(sss_exponent(1, 1, 1, ptr::null_mut()), SssStatus::NullPointer);
        let mut p = ptr::null_mut();
        assert_eq!(sss_profile_new(1, -1.0, 1, &mut p), SssStatus::InvalidArgument);
        assert!(p.is_null());
        assert_eq!(sss_profile_eval(ptr::null(), 1.0, ptr::null_mut(), ptr::null_mut()), SssStatus::NullPointer);
        assert_eq!(sss_profile_zero_count(ptr::null()), 0);
        sss_profile_free(ptr::null_mut());
        sss_exponent_table_free(ptr::null_mut());
    }
    sss_clear_error();
    assert!(sss_last_error_message().is_null());
}

#[test]
fn small_buffer_reports_length() {
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(sss_profile_new(1, 6.0, 1, &mut p), SssStatus::Ok);
        let total = sss_profile_zero_count(p);
        assert!(total >= 2);
        let mut buf = [0.0; 1];
        let mut n = 0;
        assert_eq!(sss_profile_zeros(p, buf.as_mut_ptr(), 1, &mut n), SssStatus::BufferTooSmall);
        assert_eq!(n, total);
        sss_profile_free(p);
    }
}

#[test]
fn status_names_and_version() {
    let name = unsafe { CStr::from_ptr(sss_status_name(SssStatus::BufferTooSmall)) };
    assert_eq!(name.to_str().unwrap(), "buffer too small");
    let v = unsafe { CStr::from_ptr(sss_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

/// Compiles the C smoke program against the generated header and the static
/// library of this build, then runs it.
#[test]
fn c_program_links_and_runs() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libsss_ffi.a");
    assert!(lib.exists(), "static library missing at {}", lib.display());
    let out = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("sss_smoke");
    let status = Command::new("cc")
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lm", "-lpthread", "-ldl", "-o"])
        .arg(&out)
        .status()
        .expect("running cc");
    assert!(status.success(), "C compile failed");
    let run = Command::new(&out).output().unwrap();
    assert!(run.status.success(), "smoke program failed: {}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).ends_with(" 0\n"));
}
