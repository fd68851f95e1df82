use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use etale_kit_ffi::*;

fn family(spec: &str) -> *mut EkGroupoid {
    let spec = CString::new(spec).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { ek_groupoid_from_family(spec.as_ptr(), &mut g) }, EkStatus::Ok);
    g
}

fn take_string(s: *mut c_char) -> String {
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { ek_string_free(s) };
    text
}

fn last_error() -> String {
    let p = ek_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn counts_and_effectiveness() {
    let r3 = family(r#"{"family":"pair","params":3}"#);
    let (mut arrows, mut units, mut bis, mut effective) = (0usize, 0usize, 0usize, false);
    unsafe {
        assert_eq!(ek_groupoid_arrow_count(r3, &mut arrows), EkStatus::Ok);
        assert_eq!(ek_groupoid_unit_count(r3, &mut units), EkStatus::Ok);
        assert_eq!(ek_bisection_count(r3, 16, &mut bis), EkStatus::Ok);
        assert_eq!(ek_groupoid_is_effective(r3, &mut effective), EkStatus::Ok);
        assert_eq!(ek_bisection_count(r3, 4, &mut bis), EkStatus::Invalid);
        ek_groupoid_free(r3);
    }
    assert_eq!((arrows, units, effective), (9, 3, true));
}

#[test]
fn json_round_trip_and_validation() {
    let z3 = family(r#"{"family":"cyclic_group","params":3}"#);
    let mut text = ptr::null_mut();
    assert_eq!(unsafe { ek_groupoid_to_json(z3, &mut text) }, EkStatus::Ok);
    let json = CString::new(take_string(text)).unwrap();
    let mut back = ptr::null_mut();
    assert_eq!(unsafe { ek_groupoid_from_json(json.as_ptr(), &mut back) }, EkStatus::Ok);
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { ek_validate_json(json.as_ptr(), &mut report) }, EkStatus::Ok);
    assert!(take_string(report).contains("\"violations\": []"));

    let broken = CString::new(json.to_str().unwrap().replacen("\"inv\": [0, 2, 1]", "\"inv\": [0, 1, 2]", 1)).unwrap();
    assert_ne!(broken, json);
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { ek_validate_json(broken.as_ptr(), &mut report) }, EkStatus::Invalid);
    assert!(take_string(report).contains("\"kind\": \"inverse\""));
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { ek_groupoid_from_json(broken.as_ptr(), &mut g) }, EkStatus::Invalid);
    assert!(g.is_null());

    let garbage = CString::new("{ nope").unwrap();
    assert_eq!(unsafe { ek_groupoid_from_json(garbage.as_ptr(), &mut g) }, EkStatus::Parse);
    assert!(!last_error().is_empty());
    unsafe {
        ek_groupoid_free(z3);
        ek_groupoid_free(back);
    }
}

#[test]
fn norm_of_a_bisection_element() {
    let r2 = family(r#"{"family":"pair","params":2}"#);
    let (re, im) = ([0.0, 0.0, 3.0, 0.0], [0.0, 0.0, 0.0, 4.0]);
    let mut norm = 0.0;
    assert_eq!(unsafe { ek_reduced_norm(r2, re.as_ptr(), im.as_ptr(), 4, &mut norm) }, EkStatus::Ok);
    assert!((norm - 4.0).abs() < 1e-12);
    assert_eq!(unsafe { ek_reduced_norm(r2, re.as_ptr(), ptr::null(), 3, &mut norm) }, EkStatus::Parse);
    unsafe { ek_groupoid_free(r2) };
}

#[test]
fn decompose_through_the_abi() {
    let r2 = family(r#"{"family":"pair","params":2}"#);
    // the swap automorphism twisted by the sign cocycle
    #[rustfmt::skip]
    let re = [
        0.0, 1.0, 0.0, 0.0,
        1.0, 0.0, 0.0, 0.0,
        0.0, 0.0, 0.0, -1.0,
        0.0, 0.0, -1.0, 0.0,
    ];
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { ek_hom_new(r2, r2, re.as_ptr(), ptr::null(), 16, &mut m) }, EkStatus::Ok);
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ek_decompose(m, &mut out) }, EkStatus::Ok);
    let data: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(data["Phi"], serde_json::json!([[0, 1], [1, 0], [2, 3], [3, 2]]));
    assert_eq!(data["c"], serde_json::json!([[0, "1"], [1, "1"], [2, "-1"], [3, "-1"]]));

    let doubled: Vec<f64> = re.iter().map(|x| 2.0 * x).collect();
    let mut bad = ptr::null_mut();
    assert_eq!(unsafe { ek_hom_new(r2, r2, doubled.as_ptr(), ptr::null(), 16, &mut bad) }, EkStatus::Ok);
    assert_eq!(unsafe { ek_decompose(bad, &mut out) }, EkStatus::Invalid);
    assert!(!last_error().is_empty());
    unsafe {
        ek_hom_free(m);
        ek_hom_free(bad);
        ek_groupoid_free(r2);
    }
}

#[test]
fn quotient_map_of_a_bundle() {
    let b = family(r#"{"family":"group_bundle","params":[2,1]}"#);
    let (mut q, mut m) = (ptr::null_mut(), ptr::null_mut());
    assert_eq!(unsafe { ek_quotient_star_hom(b, &mut q, &mut m) }, EkStatus::Ok);
    let (mut arrows, mut effective) = (0usize, false);
    unsafe {
        ek_groupoid_arrow_count(q, &mut arrows);
        ek_groupoid_is_effective(q, &mut effective);
    }
    assert_eq!((arrows, effective), (2, true));
    // the fibre-summing map into an effective groupoid decomposes with F = all units
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { ek_decompose(m, &mut out) }, EkStatus::Ok);
    let data: serde_json::Value = serde_json::from_str(&take_string(out)).unwrap();
    assert_eq!(data["F"].as_array().unwrap().len(), 2);
    unsafe {
        ek_hom_free(m);
        ek_groupoid_free(q);
        ek_groupoid_free(b);
    }
}

#[test]
fn null_arguments_are_reported() {
    let mut n = 0usize;
    assert_eq!(unsafe { ek_groupoid_arrow_count(ptr::null(), &mut n) }, EkStatus::NullArgument);
    assert!(last_error().contains("null"));
    assert_eq!(unsafe { ek_groupoid_from_json(ptr::null(), ptr::null_mut()) }, EkStatus::NullArgument);
    unsafe {
        ek_groupoid_free(ptr::null_mut());
        ek_hom_free(ptr::null_mut());
        ek_string_free(ptr::null_mut());
    }
    assert!(!ek_version().is_null());
}

#[test]
fn header_declares_the_api_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/etale_kit.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for name in [
        "ek_groupoid_from_json",
        "ek_decompose",
        "ek_quotient_star_hom",
        "EK_STATUS_INCONSISTENT = 3",
        "typedef struct EkHom EkHom;",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    // a syntax-only C compile, when a compiler is around
    let Ok(status) = Command::new("cc").args(["-fsyntax-only", "-x", "c", "-std=c99"]).arg(&header).status() else {
        return;
    };
    assert!(status.success());
}
