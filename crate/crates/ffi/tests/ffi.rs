use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use credal_bayes_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(cb_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

fn worked_prior() -> *mut CbCapacity {
    let p = [1.0 / 3.0; 3];
    let mut c = ptr::null_mut();
    assert_eq!(unsafe { cb_capacity_eps_contamination(p.as_ptr(), 3, 0.1, &mut c) }, CbStatus::Ok);
    c
}

fn band(lower: &[f64], upper: &[f64]) -> *mut CbLikelihood {
    let mut l = ptr::null_mut();
    let status = unsafe { cb_likelihood_band(lower.as_ptr(), upper.as_ptr(), lower.len(), &mut l) };
    assert_eq!(status, CbStatus::Ok, "{}", last_error());
    l
}

#[test]
fn worked_example_through_the_c_interface() {
    let prior = worked_prior();
    let l = band(&[0.5, 0.3, 0.2], &[0.5, 0.3, 0.2]);
    let (mut vertex, mut choquet, mut oracle, mut lower) = (0.0, 0.0, 0.0, 0.0);
    unsafe {
        assert_eq!(cb_upper_bound_vertex(prior, l, 0b001, &mut vertex), CbStatus::Ok);
        assert_eq!(cb_upper_bound_choquet(prior, l, 0b001, &mut choquet), CbStatus::Ok);
        assert_eq!(cb_oracle_upper(prior, l, 0b001, &mut oracle), CbStatus::Ok);
        assert_eq!(cb_lower_bound(prior, l, 0b001, CbRoute::Vertex, &mut lower), CbStatus::Ok);
    }
    for v in [vertex, choquet, oracle] {
        assert!((v - 4.0 / 7.0).abs() < 1e-12, "{v}");
    }
    assert!((lower - 5.0 / 11.0).abs() < 1e-12, "{lower}");
    assert_eq!(last_error(), "");
    unsafe {
        cb_likelihood_free(l);
        cb_capacity_free(prior);
    }
}

#[test]
fn capacity_accessors_and_json_round_trip() {
    let prior = worked_prior();
    unsafe {
        assert_eq!(cb_capacity_num_outcomes(prior), 3);
        assert_eq!(cb_capacity_num_outcomes(ptr::null()), 0);
        let mut v = 0.0;
        assert_eq!(cb_capacity_value(prior, 0b011, &mut v), CbStatus::Ok);
        assert!((v - (0.9 * 2.0 / 3.0 + 0.1)).abs() < 1e-15);
        assert_eq!(cb_capacity_value(prior, 0b1000, &mut v), CbStatus::InvalidInput);
        let mut two = false;
        assert_eq!(cb_capacity_is_two_alternating(prior, &mut two), CbStatus::Ok);
        assert!(two);

        let mut text = ptr::null_mut();
        assert_eq!(cb_capacity_to_json(prior, &mut text), CbStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(cb_capacity_from_json(text, &mut again), CbStatus::Ok);
        assert_eq!(cb_capacity_value(again, 0b011, &mut v), CbStatus::Ok);
        assert!((v - (0.9 * 2.0 / 3.0 + 0.1)).abs() < 1e-15);
        cb_string_free(text);
        cb_capacity_free(again);
        cb_capacity_free(prior);
    }
}

#[test]
fn posterior_capacity_handle() {
    let prior = worked_prior();
    let l = band(&[0.4, 0.2, 0.2], &[0.5, 0.3, 0.25]);
    unsafe {
        let mut post = ptr::null_mut();
        assert_eq!(cb_posterior_capacity(prior, l, &mut post), CbStatus::Ok);
        let mut two = false;
        assert_eq!(cb_capacity_is_two_alternating(post, &mut two), CbStatus::Ok);
        assert!(two);
        let (mut a, mut b) = (0.0, 0.0);
        assert_eq!(cb_capacity_value(post, 0b001, &mut a), CbStatus::Ok);
        assert_eq!(cb_upper_bound_vertex(prior, l, 0b001, &mut b), CbStatus::Ok);
        assert_eq!(a, b);
        cb_capacity_free(post);
        cb_likelihood_free(l);
        cb_capacity_free(prior);
    }
}

#[test]
fn errors_are_reported_with_codes_and_messages() {
    unsafe {
        let mut c = ptr::null_mut();
        assert_eq!(cb_capacity_from_json(ptr::null(), &mut c), CbStatus::NullPointer);
        assert!(last_error().contains("json"));

        let bad = CString::new(r#"{"outcomes": ["a", "b"], "kind": "explicit", "values": {"": 0, "a": 0.6, "b": 0.5, "a,b": 0.55}}"#).unwrap();
        assert_eq!(cb_capacity_from_json(bad.as_ptr(), &mut c), CbStatus::InvalidInput);
        assert!(last_error().contains("not monotone"), "{}", last_error());
        assert!(c.is_null());

        let p = [0.5, 0.5];
        assert_eq!(cb_capacity_eps_contamination(p.as_ptr(), 2, 1.5, &mut c), CbStatus::InvalidInput);
        assert!(last_error().contains("eps"));

        let mut l = ptr::null_mut();
        assert_eq!(
            cb_likelihood_band([0.5, 0.1].as_ptr(), [0.4, 0.2].as_ptr(), 2, &mut l),
            CbStatus::InvalidInput
        );

        let prior = worked_prior();
        let zero = band(&[0.0; 3], &[0.0; 3]);
        let mut v = 0.0;
        assert_eq!(cb_upper_bound_vertex(prior, zero, 0b001, &mut v), CbStatus::UndefinedRatio);
        assert_eq!(cb_upper_bound_vertex(prior, zero, 0b001, ptr::null_mut()), CbStatus::UndefinedRatio);
        let wrong = band(&[0.1, 0.2], &[0.1, 0.2]);
        assert_eq!(cb_upper_bound_vertex(prior, wrong, 0b001, &mut v), CbStatus::InvalidInput);

        let not_two = CString::new(
            r#"{"outcomes": ["a", "b"], "kind": "explicit", "values": {"": 0, "a": 0.2, "b": 0.2, "a,b": 1}}"#,
        )
        .unwrap();
        assert_eq!(cb_capacity_from_json(not_two.as_ptr(), &mut c), CbStatus::Ok);
        let l2 = band(&[0.1, 0.2], &[0.3, 0.4]);
        let mut post = ptr::null_mut();
        assert_eq!(cb_posterior_capacity(c, l2, &mut post), CbStatus::NotTwoAlternating);
        assert_eq!(cb_upper_bound_vertex(c, l2, 0b01, &mut v), CbStatus::EmptyCore);

        cb_capacity_free(c);
        cb_capacity_free(prior);
        cb_likelihood_free(zero);
        cb_likelihood_free(wrong);
        cb_likelihood_free(l2);
        cb_capacity_free(ptr::null_mut());
        cb_likelihood_free(ptr::null_mut());
        cb_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_interface_and_compiles() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/credal_bayes.h");
    let text = std::fs::read_to_string(&header).expect("header generated by the build script");
    for name in [
        "cb_capacity_from_json",
        "cb_capacity_eps_contamination",
        "cb_capacity_value",
        "cb_capacity_is_two_alternating",
        "cb_capacity_free",
        "cb_likelihood_band",
        "cb_upper_bound_vertex",
        "cb_upper_bound_choquet",
        "cb_lower_bound",
        "cb_posterior_capacity",
        "cb_oracle_upper",
        "cb_last_error_message",
        "CB_STATUS_UNDEFINED_RATIO",
        "typedef struct CbCapacity CbCapacity;",
    ] {
        assert!(text.contains(name), "header lacks {name}");
    }
    // Syntax check with the system C compiler when there is one.
    if let Ok(status) = Command::new("cc")
        .args(["-fsyntax-only", "-x", "c", "-Wall", "-Werror"])
        .arg(&header)
        .status()
    {
        assert!(status.success(), "header does not compile as C");
    }
}
