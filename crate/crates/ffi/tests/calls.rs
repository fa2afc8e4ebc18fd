use std::ffi::CStr;
use std::f64::consts::PI;
use std::ptr;

use hcs_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(hcs_last_error()) }.to_string_lossy().into_owned()
}

fn new_state(re: [f64; 3], im: [f64; 3]) -> *mut HcsState {
    let mut state = ptr::null_mut();
    let status = unsafe { hcs_state_new(re.as_ptr(), im.as_ptr(), &mut state) };
    assert_eq!(status, HcsStatus::Ok, "{}", last_error());
    assert!(!state.is_null());
    state
}

#[test]
fn ground_state_values() {
    let s = new_state([0.0; 3], [0.0; 3]);
    unsafe {
        let mut a = HcsComplex { re: 0.0, im: 0.0 };
        assert_eq!(hcs_state_amplitude(s, 0.0, 0.0, 1.0, &mut a), HcsStatus::Ok);
        assert!((a.re - (-1.0f64).exp() / PI.sqrt()).abs() < 1e-15 && a.im.abs() < 1e-15);
        let mut w = [0.0; 4];
        assert_eq!(hcs_state_w(s, w.as_mut_ptr()), HcsStatus::Ok);
        assert_eq!(w, [1.0, 0.0, 0.0, 0.0]);
        let mut ww = 0.0;
        assert_eq!(hcs_state_ww(s, &mut ww), HcsStatus::Ok);
        assert_eq!(ww, 1.0);
        let mut r = 0.0;
        assert_eq!(hcs_state_expect_r(s, &mut r), HcsStatus::Ok);
        assert_eq!(r, 2.0);
        let mut x = [1.0; 3];
        assert_eq!(hcs_state_expect_position(s, x.as_mut_ptr()), HcsStatus::Ok);
        assert_eq!(x, [0.0; 3]);
        hcs_state_free(s);
    }
    assert_eq!(last_error(), "");
}

#[test]
fn overlap_and_evolution() {
    let a = new_state([0.0; 3], [0.0; 3]);
    let b = new_state([0.0, 0.5, 0.0], [0.0; 3]);
    unsafe {
        let mut z = HcsComplex { re: 0.0, im: 0.0 };
        assert_eq!(hcs_overlap(a, b, &mut z), HcsStatus::Ok);
        assert!(((z.re * z.re + z.im * z.im).sqrt() - 0.75).abs() < 1e-14);

        let mut c = ptr::null_mut();
        assert_eq!(hcs_state_evolve(b, 2.0 * PI, &mut c), HcsStatus::Ok);
        assert_eq!(hcs_overlap(b, c, &mut z), HcsStatus::Ok);
        assert!((z.re - 1.0).abs() < 1e-14 && z.im.abs() < 1e-14);
        for s in [a, b, c] {
            hcs_state_free(s);
        }
    }
}

#[test]
fn special_functions_and_algebra() {
    unsafe {
        let mut v = 0.0;
        assert_eq!(hcs_laguerre(2, 0, 1.0, &mut v), HcsStatus::Ok);
        assert!((v + 0.5).abs() < 1e-15);
        let mut e = HcsComplex { re: 0.0, im: 0.0 };
        assert_eq!(hcs_eigenstate(0, 0, 0, 0.0, 0.0, 0.0, &mut e), HcsStatus::Ok);
        assert!((e.re - 1.0 / PI.sqrt()).abs() < 1e-15);
        assert_eq!(hcs_commutator_max_residual(6, &mut v), HcsStatus::Ok);
        assert!(v < 1e-10);
    }
}

#[test]
fn error_codes() {
    unsafe {
        let mut state = ptr::null_mut();
        let re = [0.0, 0.0, 0.0];
        // u = (2i, 0, 0) has w⁰ < 0.
        let im = [2.0, 0.0, 0.0];
        assert_eq!(hcs_state_new(re.as_ptr(), im.as_ptr(), &mut state), HcsStatus::Inadmissible);
        assert!(state.is_null());
        assert!(last_error().contains("inadmissible"), "{}", last_error());

        // 1 + u² = 0.
        let re = [0.0; 3];
        let im = [1.0, 0.0, 0.0];
        assert_eq!(hcs_state_new(re.as_ptr(), im.as_ptr(), &mut state), HcsStatus::Singular);

        let bad = [f64::NAN, 0.0, 0.0];
        assert_eq!(hcs_state_new(bad.as_ptr(), re.as_ptr(), &mut state), HcsStatus::InvalidArgument);
        assert_eq!(hcs_state_new(ptr::null(), re.as_ptr(), &mut state), HcsStatus::NullPointer);
        assert!(last_error().contains("u_re"));
        assert_eq!(hcs_state_new(re.as_ptr(), re.as_ptr(), ptr::null_mut()), HcsStatus::NullPointer);

        let mut v = 0.0;
        assert_eq!(hcs_state_ww(ptr::null(), &mut v), HcsStatus::NullPointer);
        assert_eq!(hcs_commutator_max_residual(2, &mut v), HcsStatus::InvalidArgument);
        assert_eq!(hcs_laguerre(1, 0, f64::INFINITY, &mut v), HcsStatus::InvalidArgument);
        hcs_state_free(ptr::null_mut());
    }
}

#[test]
fn status_messages_are_static() {
    for status in [
        HcsStatus::Ok,
        HcsStatus::NullPointer,
        HcsStatus::InvalidArgument,
        HcsStatus::Inadmissible,
        HcsStatus::Singular,
        HcsStatus::NotConverged,
        HcsStatus::NumericalFailure,
        HcsStatus::Panic,
    ] {
        let text = unsafe { CStr::from_ptr(hcs_status_message(status)) };
        assert!(!text.to_bytes().is_empty());
    }
}
