use std::ffi::{CStr, CString};
use std::ptr;

use hyptrace_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(ht_last_error()) }.to_string_lossy().into_owned()
}

fn preset(name: &str) -> *mut HtBackend {
    let mut b = ptr::null_mut();
    assert_eq!(unsafe { ht_backend_preset(c(name).as_ptr(), &mut b) }, HtStatus::Ok);
    b
}

fn element(b: *const HtBackend, word: &str) -> *mut HtElement {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { ht_element_parse(b, c(word).as_ptr(), &mut g) }, HtStatus::Ok, "{}", last_error());
    g
}

fn format(b: *const HtBackend, g: *const HtElement) -> String {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { ht_element_format(b, g, &mut s) }, HtStatus::Ok);
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { ht_string_free(s) };
    out
}

#[test]
fn arithmetic_round_trip() {
    let b = preset("free2");
    let x = element(b, "x y");
    let y = element(b, "y^-1 x");
    let mut xy = ptr::null_mut();
    let mut inv = ptr::null_mut();
    let mut len = 0usize;
    unsafe {
        assert_eq!(ht_multiply(b, x, y, &mut xy), HtStatus::Ok);
        assert_eq!(format(b, xy), "x^2");
        assert_eq!(ht_invert(b, xy, &mut inv), HtStatus::Ok);
        assert_eq!(format(b, inv), "x^-2");
        assert_eq!(ht_word_length(b, inv, &mut len), HtStatus::Ok);
        assert_eq!(len, 2);
        for g in [x, y, xy, inv] {
            ht_element_free(g);
        }
        ht_backend_free(b);
    }
}

#[test]
fn sphere_sizes_and_short_buffers() {
    let b = preset("free2");
    let mut buf = [0u64; 6];
    let mut len = 0usize;
    unsafe {
        assert_eq!(ht_sphere_sizes(b, 5, 1 << 30, buf.as_mut_ptr(), buf.len(), &mut len), HtStatus::Ok);
        assert_eq!(&buf[..len], &[1, 4, 12, 36, 108, 324]);
        assert_eq!(ht_sphere_sizes(b, 7, 1 << 30, buf.as_mut_ptr(), buf.len(), &mut len), HtStatus::BufferTooSmall);
        assert_eq!(len, 8);
        assert_eq!(ht_sphere_sizes(b, 12, 1000, buf.as_mut_ptr(), buf.len(), &mut len), HtStatus::BudgetExceeded);
        ht_backend_free(b);
    }
}

#[test]
fn class_counts_traces_and_certificates() {
    let b = preset("paper-example-3");
    let a = element(b, "a");
    let mut buf = [0u64; 8];
    let (mut len, mut exact, mut dim) = (0usize, false, 0usize);
    unsafe {
        assert_eq!(ht_class_counts(b, a, 4, buf.as_mut_ptr(), buf.len(), &mut len, &mut exact), HtStatus::Ok);
        assert_eq!(buf[..len].iter().sum::<u64>(), 2);
        assert_eq!(ht_trace_space_dimension(b, 4, 1 << 30, &mut dim), HtStatus::Ok);
        assert_eq!(dim, 2);
        let mut json = ptr::null_mut();
        assert_eq!(ht_certificate_json(b, a, 2.0, 8, &mut json), HtStatus::WrongRegime);
        assert!(json.is_null());
        assert!(last_error().contains("finite"), "{}", last_error());
        ht_element_free(a);
        ht_backend_free(b);
    }

    let f = preset("free2");
    let x = element(f, "x");
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(ht_certificate_json(f, x, 2.0, 9, &mut json), HtStatus::InsufficientData);
        assert_eq!(ht_certificate_json(f, x, 2.0, 11, &mut json), HtStatus::Ok);
        let doc: serde_json::Value = serde_json::from_str(CStr::from_ptr(json).to_str().unwrap()).unwrap();
        assert_eq!(doc["rows"].as_array().unwrap().len(), 6);
        ht_string_free(json);
        ht_element_free(x);
        ht_backend_free(f);
    }
}

#[test]
fn invalid_input_is_reported() {
    let mut b = ptr::null_mut();
    unsafe {
        assert_eq!(ht_backend_preset(c("nope").as_ptr(), &mut b), HtStatus::InvalidInput);
        assert!(last_error().contains("nope"));
        assert_eq!(ht_backend_preset(ptr::null(), &mut b), HtStatus::NullPointer);
        assert_eq!(ht_backend_parse(c("free_product(cyclic(3),cyclic(3))").as_ptr(), &mut b), HtStatus::Ok);
        let mut g = ptr::null_mut();
        assert_eq!(ht_element_parse(b, c("x").as_ptr(), &mut g), HtStatus::InvalidInput);
        let other = preset("free2");
        let x = element(other, "x");
        let mut out = ptr::null_mut();
        assert_eq!(ht_invert(b, x, &mut out), HtStatus::Failed);
        ht_element_free(x);
        ht_backend_free(other);
        ht_backend_free(b);
        ht_string_free(ptr::null_mut());
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/hyptrace.h");
    let status = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header])
        .status();
    match status {
        Ok(s) => assert!(s.success(), "header failed to compile"),
        Err(e) => eprintln!("skipping header check: no C compiler ({e})"),
    }
}
