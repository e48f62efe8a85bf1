use std::ffi::{c_char, CStr, CString};
use std::ptr;

use resolventlab_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as c_char; 256];
    unsafe { rl_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn residue_transform_at_origin() {
    let (mut re, mut im) = (0.0, 0.0);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let st = unsafe { rl_residue_transform(0.0, h, h, 4, &mut re, &mut im) };
    assert_eq!(st, RlStatus::Ok);
    assert!((re - std::f64::consts::PI / 2f64.sqrt()).abs() < 1e-10, "{re}");
    assert!(im.abs() < 1e-10);
}

#[test]
fn outside_sector_maps_to_code_two() {
    let (mut re, mut im) = (0.0, 0.0);
    let st = unsafe { rl_residue_transform(0.0, 0.0, 1.0, 4, &mut re, &mut im) };
    assert_eq!(st, RlStatus::OutsideSector);
    assert_eq!(st as i32, 2);
    assert!(last_error().contains("outside"));
}

#[test]
fn null_outputs_are_rejected() {
    let st = unsafe { rl_residue_transform(0.0, 1.0, 1.0, 2, ptr::null_mut(), ptr::null_mut()) };
    assert_eq!(st, RlStatus::NullPointer);
    let mut count = 0u64;
    assert_eq!(unsafe { rl_model_count(ptr::null(), 1.0, &mut count) }, RlStatus::NullPointer);
}

#[test]
fn region_membership() {
    let mut member = false;
    let mut dist = 0.0;
    let st = unsafe { rl_region_member(2, 0.5, 1.0, 2.0, &mut member, &mut dist) };
    assert_eq!(st, RlStatus::Ok);
    assert!(member);
    assert!((dist - 2.0).abs() < 1e-12);
}

#[test]
fn torus_model_lifecycle() {
    let mut model = ptr::null_mut();
    assert_eq!(unsafe { rl_model_torus(2, 2, 10.0, &mut model) }, RlStatus::Ok);
    assert!(!model.is_null());
    let mut count = 0u64;
    assert_eq!(unsafe { rl_model_count(model, 1.5, &mut count) }, RlStatus::Ok);
    // |k| < 1.5: the origin, four unit vectors, four diagonals.
    assert_eq!(count, 9);
    let mut norm = 0.0;
    let z = (1.6f64, 0.3f64);
    assert_eq!(unsafe { rl_l2_resolvent_norm(model, z.0, z.1, &mut norm) }, RlStatus::Ok);
    let zm = (z.0 * z.0 - z.1 * z.1, 2.0 * z.0 * z.1);
    let expected = 1.0 / ((zm.0 - 2.0).powi(2) + zm.1.powi(2)).sqrt();
    assert!((norm - expected).abs() < 1e-12, "{norm} vs {expected}");
    unsafe { rl_model_free(model) };
    unsafe { rl_model_free(ptr::null_mut()) };
}

#[test]
fn zoll_model_and_bad_parameters() {
    let mut model = ptr::null_mut();
    assert_eq!(unsafe { rl_model_zoll(2, 2, 10, &mut model) }, RlStatus::Ok);
    unsafe { rl_model_free(model) };
    let mut model = ptr::null_mut();
    let st = unsafe { rl_model_zoll(2, 3, 10, &mut model) };
    assert_eq!(st, RlStatus::InvalidParameter);
    assert!(model.is_null());
    assert!(!last_error().is_empty());
}

#[test]
fn parse_complex_literal() {
    let s = CString::new("1-2.5i").unwrap();
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { rl_parse_complex(s.as_ptr(), &mut re, &mut im) }, RlStatus::Ok);
    assert_eq!((re, im), (1.0, -2.5));
    let bad = CString::new("one").unwrap();
    assert_eq!(unsafe { rl_parse_complex(bad.as_ptr(), &mut re, &mut im) }, RlStatus::Parse);
}

#[test]
fn version_and_header() {
    let v = unsafe { CStr::from_ptr(rl_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/resolventlab.h")).unwrap();
    for sym in ["rl_residue_transform", "rl_model_torus", "rl_model_free", "rl_l2_resolvent_norm", "RL_STATUS_PANIC"] {
        assert!(header.contains(sym), "{sym} missing from header");
    }
}
