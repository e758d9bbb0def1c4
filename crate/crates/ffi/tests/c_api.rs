use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use hurwitz_ffi::*;

fn last_error() -> String {
    let p = hz_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn take_string(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned();
    unsafe { hz_string_free(p) };
    s
}

#[test]
fn expand_two_fifths() {
    let z = CString::new("2/5+0/1 i").unwrap();
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { hz_expand(z.as_ptr(), 100, &mut e) }, HzStatus::Ok);
    assert_eq!(unsafe { hz_expansion_len(e) }, 2);
    assert!(unsafe { hz_expansion_terminated(e) });
    let (mut re, mut im) = (0i64, 0i64);
    assert_eq!(unsafe { hz_expansion_digit(e, 0, &mut re, &mut im) }, HzStatus::Ok);
    assert_eq!((re, im), (3, 0));
    assert_eq!(unsafe { hz_expansion_digit(e, 1, &mut re, &mut im) }, HzStatus::Ok);
    assert_eq!((re, im), (-2, 0));
    assert_eq!(unsafe { hz_expansion_digit(e, 2, &mut re, &mut im) }, HzStatus::InvalidArgument);
    assert!(last_error().contains("out of range"));
    unsafe { hz_expansion_free(e) };
}

#[test]
fn expand_rejects_points_outside_the_box() {
    let z = CString::new("1/2+0/1 i").unwrap();
    let mut e = ptr::null_mut();
    assert_eq!(unsafe { hz_expand(z.as_ptr(), 100, &mut e) }, HzStatus::Domain);
    assert!(e.is_null());
    assert!(last_error().contains("re = 1/2"), "{}", last_error());
    let bad = CString::new("two fifths").unwrap();
    assert_eq!(unsafe { hz_expand(bad.as_ptr(), 100, &mut e) }, HzStatus::Parse);
    assert_eq!(unsafe { hz_expand(ptr::null(), 100, &mut e) }, HzStatus::NullPointer);
}

#[test]
fn evaluate_word() {
    let digits = [3i64, 0, -2, 0];
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { hz_evaluate(digits.as_ptr(), 2, &mut out) }, HzStatus::Ok);
    assert_eq!(take_string(out), "2/5");
    let zero = [0i64, 0];
    assert_ne!(unsafe { hz_evaluate(zero.as_ptr(), 1, &mut out) }, HzStatus::Ok);
}

#[test]
fn classify() {
    assert_eq!(hz_classify_digit(1, 0), HzDigitClass::Invalid);
    assert_eq!(hz_classify_digit(2, 1), HzDigitClass::Exceptional);
    assert_eq!(hz_classify_digit(2, 2), HzDigitClass::Regular);
}

#[test]
fn alphabet_pressure_and_dimension() {
    let text = CString::new("2,2;-2,-2").unwrap();
    let mut a = ptr::null_mut();
    assert_eq!(unsafe { hz_alphabet_parse(text.as_ptr(), &mut a) }, HzStatus::Ok);
    assert_eq!(unsafe { hz_alphabet_len(a) }, 2);

    let mut p = HzPressure::default();
    assert_eq!(
        unsafe { hz_partition_sum(a, 3, 0.0, HzPressureMode::SupNorm, 1 << 20, &mut p) },
        HzStatus::Ok
    );
    assert!((p.log_zn_over_n - 2f64.ln()).abs() < 1e-12);
    assert!(p.lower_bracket <= p.upper_bracket);

    assert_eq!(
        unsafe { hz_partition_sum(a, 30, 0.5, HzPressureMode::SupNorm, 1000, &mut p) },
        HzStatus::BudgetExceeded
    );

    let mut b = HzBowen::default();
    assert_eq!(unsafe { hz_bowen_dimension(a, 1e-3, 8, &mut b) }, HzStatus::Ok);
    assert!(b.s_low <= b.s_high && b.s_low >= 0.0 && b.s_high <= 2.0);
    unsafe { hz_alphabet_free(a) };

    let bad = CString::new("1,0").unwrap();
    assert_ne!(unsafe { hz_alphabet_parse(bad.as_ptr(), &mut a) }, HzStatus::Ok);
}

#[test]
fn tau_and_svg() {
    let mut t = 0.0;
    assert_eq!(unsafe { hz_tau_lattice(false, 100_000, &mut t) }, HzStatus::Ok);
    assert!((t - 2.0).abs() < 0.05, "{t}");
    assert_eq!(unsafe { hz_tau_lattice(false, 10, &mut t) }, HzStatus::InvalidArgument);

    let mut svg = ptr::null_mut();
    assert_eq!(unsafe { hz_tessellate_svg(8, true, &mut svg) }, HzStatus::Ok);
    assert_eq!(take_string(svg).matches("<path").count(), 20);
}

#[test]
fn verify_arith_suite() {
    let suite = CString::new("arith").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { hz_verify(suite.as_ptr(), 7, &mut out) }, HzStatus::Ok);
    let json: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 4);
}

#[test]
fn free_functions_accept_null() {
    unsafe {
        hz_string_free(ptr::null_mut());
        hz_expansion_free(ptr::null_mut());
        hz_alphabet_free(ptr::null_mut());
    }
    assert_eq!(unsafe { hz_expansion_len(ptr::null()) }, 0);
}

fn header() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/hurwitz.h")
}

#[test]
fn header_declares_every_export() {
    let h = std::fs::read_to_string(header()).unwrap();
    for f in [
        "hz_last_error_message", "hz_string_free", "hz_expand", "hz_expansion_len",
        "hz_expansion_terminated", "hz_expansion_digit", "hz_expansion_free", "hz_evaluate",
        "hz_classify_digit", "hz_alphabet_parse", "hz_alphabet_len", "hz_alphabet_free",
        "hz_partition_sum", "hz_bowen_dimension", "hz_tau_lattice", "hz_tessellate_svg", "hz_verify",
    ] {
        assert!(h.contains(&format!("{f}(")), "missing {f}");
    }
    assert!(h.contains("typedef struct HzExpansion HzExpansion;"));
}

/// Compiles and runs a small C program against the static library.
#[test]
fn c_program_links_against_static_library() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|d| d.parent()).unwrap();
    let lib = profile_dir.join("libhurwitz_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(
        &src,
        r#"
#include <stdio.h>
#include <string.h>
#include "hurwitz.h"
int main(void) {
    HzExpansion *e = NULL;
    if (hz_expand("2/5+0/1 i", 100, &e) != HZ_STATUS_OK) return 10;
    int64_t re, im;
    if (hz_expansion_len(e) != 2) return 11;
    hz_expansion_digit(e, 0, &re, &im);
    if (re != 3 || im != 0) return 12;
    hz_expansion_free(e);
    if (hz_expand("1/2+0/1 i", 100, &e) != HZ_STATUS_DOMAIN) return 13;
    if (strstr(hz_last_error_message(), "not in U") == NULL) return 14;
    printf("ok\n");
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("prog");
    let status = Command::new("cc")
        .arg("-std=c11")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&src)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}
