use std::ffi::CStr;
use std::ptr;

use teleport_witness_ffi::*;

fn last_error() -> String {
    let p = tw_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn bell() -> *mut TwState {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { tw_state_isotropic(2, 1.0, &mut s) }, TwStatus::Ok);
    s
}

#[test]
fn bell_state_round_trip() {
    let s = bell();
    unsafe {
        assert_eq!(tw_state_dim(s), 2);
        let mut e = 0.0;
        assert_eq!(tw_witness_expectation(s, &mut e), TwStatus::Ok);
        assert!((e + 0.5).abs() < 1e-12);

        let mut f = std::mem::zeroed::<TwFef>();
        assert_eq!(tw_fef_exact_2x2(s, &mut f), TwStatus::Ok);
        assert!((f.value - 1.0).abs() < 1e-12);
        assert_eq!(f.method, TwFefMethod::Exact2x2);

        assert_eq!(tw_fef_optimize(s, 4, 0, &mut f), TwStatus::Ok);
        assert!((f.value - 1.0).abs() < 1e-7);
        assert_eq!(f.method, TwFefMethod::UnitaryAscent);

        let mut r = std::mem::zeroed::<TwReport>();
        assert_eq!(tw_classify(s, true, 4, 0, &mut r), TwStatus::Ok);
        assert_eq!(r.verdict, TwVerdict::UsefulDetected);
        assert_eq!(r.fef_method, TwFefMethod::Exact2x2);
        assert_eq!(tw_classify(s, false, 4, 0, &mut r), TwStatus::Ok);
        assert_eq!(r.fef_method, TwFefMethod::None);
        tw_state_free(s);
    }
}

#[test]
fn matrix_constructor_validates() {
    let mut re = [0.0; 16];
    let im = [0.0; 16];
    for k in 0..4 {
        re[k * 5] = 0.25;
    }
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(tw_state_from_matrix(2, re.as_ptr(), im.as_ptr(), 16, &mut s), TwStatus::Ok);
        let mut e = 0.0;
        tw_witness_expectation(s, &mut e);
        assert!((e - 0.25).abs() < 1e-12);
        tw_state_free(s);

        re[0] = 0.15;
        let mut bad = ptr::null_mut();
        assert_eq!(
            tw_state_from_matrix(2, re.as_ptr(), im.as_ptr(), 16, &mut bad),
            TwStatus::InvalidState
        );
        assert!(bad.is_null());
        assert!(last_error().contains("trace"));

        assert_eq!(
            tw_state_from_matrix(2, re.as_ptr(), im.as_ptr(), 15, &mut bad),
            TwStatus::InvalidState
        );
        assert!(bad.is_null());
    }
}

#[test]
fn null_pointers_are_rejected() {
    unsafe {
        let mut e = 0.0;
        assert_eq!(tw_witness_expectation(ptr::null(), &mut e), TwStatus::NullPointer);
        assert!(!last_error().is_empty());
        assert_eq!(tw_state_isotropic(2, 0.5, ptr::null_mut()), TwStatus::NullPointer);
        assert_eq!(tw_state_dim(ptr::null()), 0);
        tw_state_free(ptr::null_mut());
    }
}

#[test]
fn out_of_range_parameters() {
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(tw_state_isotropic(2, 1.5, &mut s), TwStatus::InvalidArgument);
        assert!(s.is_null());
        assert!(last_error().contains("beta"));
        assert_eq!(tw_state_mems(-0.1, &mut s), TwStatus::InvalidArgument);
        let mut f = std::mem::zeroed::<TwFef>();
        let mut r = ptr::null_mut();
        assert_eq!(tw_state_random(3, 2, 1, &mut r), TwStatus::Ok);
        assert_ne!(tw_fef_exact_2x2(r, &mut f), TwStatus::Ok);
        tw_state_free(r);
    }
}

#[test]
fn witness_operator_buffer() {
    let mut re = vec![0.0; 81];
    let mut im = vec![0.0; 81];
    unsafe {
        assert_eq!(
            tw_witness_operator(3, re.as_mut_ptr(), im.as_mut_ptr(), 80),
            TwStatus::BufferTooSmall
        );
        assert_eq!(tw_witness_operator(3, re.as_mut_ptr(), im.as_mut_ptr(), 81), TwStatus::Ok);
    }
    // W = I/3 - |psi+><psi+|: diagonal 1/3 - 1/3 on |kk>, off-diagonal -1/3 between |jj>, |kk>.
    for (i, j) in [(0, 0), (0, 4), (4, 8), (8, 0)] {
        assert!((re[i * 9 + j] - (if i == j { 0.0 } else { -1.0 / 3.0 })).abs() < 1e-15);
    }
    assert!((re[9 + 1] - 1.0 / 3.0).abs() < 1e-15);
    assert!(im.iter().all(|&x| x == 0.0));
}

#[test]
fn closed_forms() {
    let mut v = 0.0;
    unsafe {
        assert_eq!(tw_isotropic_expectation(3, 0.25, &mut v), TwStatus::Ok);
        assert!(v.abs() < 1e-15);
        let alphas = [std::f64::consts::FRAC_1_SQRT_2; 2];
        assert_eq!(tw_werner_expectation(2, 1.0, alphas.as_ptr(), &mut v), TwStatus::Ok);
        assert!((v + 0.5).abs() < 1e-12);
        assert_eq!(tw_mems_expectation(1.0, &mut v), TwStatus::Ok);
        assert!((v + 0.5).abs() < 1e-12);
        assert_eq!(tw_continuity_bound(3, &mut v), TwStatus::Ok);
        assert_eq!(v, 9.0);
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/teleport_witness.h");
    assert!(std::path::Path::new(header).exists());
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    match std::process::Command::new(&cc)
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header])
        .output()
    {
        Ok(out) => assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr)),
        Err(_) => eprintln!("no C compiler ({cc}); header syntax not checked"),
    }
}
