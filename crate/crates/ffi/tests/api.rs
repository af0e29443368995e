use std::ffi::CStr;
use std::ptr;

use yamabe_ffi::*;

fn last_error() -> String {
    let p = yamabe_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn shrinking(beta: f64) -> *mut YamabeParams {
    let mut p = ptr::null_mut();
    assert_eq!(
        unsafe { yamabe_params_soliton(3, beta, 1.0, 1.0, &mut p) },
        YamabeStatus::Ok
    );
    p
}

#[test]
fn params_round_trip_and_validation() {
    let p = shrinking(1.0);
    let mut v = YamabeParamValues {
        n: 0,
        m: 0.0,
        alpha: 0.0,
        beta: 0.0,
        rho: 0.0,
        has_rho: false,
        eta: 0.0,
    };
    unsafe {
        assert_eq!(yamabe_params_values(p, &mut v), YamabeStatus::Ok);
        yamabe_params_free(p);
    }
    assert_eq!((v.n, v.alpha, v.has_rho, v.rho), (3, 3.75, true, 1.0));
    assert!((v.m - 0.2).abs() < 1e-15);

    let mut bad = ptr::null_mut();
    let s = unsafe { yamabe_params_general(3, 0.9, 1.0, 1.0, 1.0, &mut bad) };
    assert_eq!(s, YamabeStatus::InvalidParams);
    assert!(bad.is_null());
    assert!(last_error().contains("m"), "{}", last_error());
}

#[test]
fn null_pointers_are_reported() {
    let s = unsafe { yamabe_params_soliton(3, 1.0, 1.0, 1.0, ptr::null_mut()) };
    assert_eq!(s, YamabeStatus::NullPointer);
    let mut n = 0usize;
    assert_eq!(
        unsafe { yamabe_profile_len(ptr::null(), &mut n) },
        YamabeStatus::NullPointer
    );
    assert_eq!(last_error(), "profile is NULL");
    unsafe {
        yamabe_params_free(ptr::null_mut());
        yamabe_profile_free(ptr::null_mut());
        yamabe_string_free(ptr::null_mut());
    }
}

#[test]
fn certificate_case2() {
    let mut p = ptr::null_mut();
    let mut cert = YamabeCertificate {
        case_tag: YamabeBlowupCase::Case3,
        has_bound: false,
        c1: 0.0,
        radius_bound: 0.0,
    };
    unsafe {
        assert_eq!(yamabe_params_general(3, 0.2, -1.0, -1.0, 1.0, &mut p), YamabeStatus::Ok);
        assert_eq!(yamabe_blowup_certificate(p, &mut cert), YamabeStatus::Ok);
    }
    assert_eq!(cert.case_tag, YamabeBlowupCase::Case2);
    assert!(cert.has_bound);
    assert!((cert.radius_bound - 15f64.sqrt()).abs() < 1e-12);

    let mut prof = ptr::null_mut();
    let (mut kind, mut r) = (YamabeProfileKind::Global, 0.0);
    unsafe {
        assert_eq!(yamabe_solve(p, 40.0, ptr::null(), &mut prof), YamabeStatus::Ok);
        assert_eq!(yamabe_profile_status(prof, &mut kind, &mut r), YamabeStatus::Ok);
        yamabe_profile_free(prof);
    }
    assert_eq!(kind, YamabeProfileKind::BlowUp);
    assert!(r <= cert.radius_bound + 1e-6);

    let q = shrinking(1.0);
    unsafe {
        assert_eq!(yamabe_blowup_certificate(q, &mut cert), YamabeStatus::NotBlowupRegime);
        yamabe_params_free(q);
        yamabe_params_free(p);
    }
}

#[test]
fn profile_columns_and_geometry() {
    let p = shrinking(3.0);
    let mut prof = ptr::null_mut();
    let mut len = 0usize;
    unsafe {
        assert_eq!(yamabe_solve(p, 100.0, ptr::null(), &mut prof), YamabeStatus::Ok);
        assert_eq!(yamabe_profile_len(prof, &mut len), YamabeStatus::Ok);
    }
    let mut r = vec![0.0; len];
    let mut short = vec![0.0; len - 1];
    unsafe {
        assert_eq!(
            yamabe_profile_column(prof, YamabeProfileColumn::R, r.as_mut_ptr(), len),
            YamabeStatus::Ok
        );
        assert_eq!(
            yamabe_profile_column(prof, YamabeProfileColumn::V, short.as_mut_ptr(), len - 1),
            YamabeStatus::BufferTooSmall
        );
    }
    assert_eq!(*r.last().unwrap(), 100.0);

    let (mut v, mut dv) = (0.0, 0.0);
    unsafe {
        assert_eq!(yamabe_profile_eval(prof, 1.0, &mut v, &mut dv), YamabeStatus::Ok);
        assert_eq!(
            yamabe_profile_eval(prof, 1e3, &mut v, &mut dv),
            YamabeStatus::OutOfRange
        );
    }

    let mut geo = ptr::null_mut();
    let mut origin = YamabeOriginValues {
        scalar_curvature: 0.0,
        k0: 0.0,
        k1: 0.0,
        k0_crosscheck_defect: 0.0,
    };
    let mut k1 = vec![0.0; len];
    unsafe {
        assert_eq!(yamabe_geometry(prof, &mut geo), YamabeStatus::Ok);
        assert_eq!(yamabe_geometry_origin(geo, &mut origin), YamabeStatus::Ok);
        assert_eq!(
            yamabe_geometry_column(geo, YamabeGeometryColumn::K1, k1.as_mut_ptr(), len),
            YamabeStatus::Ok
        );
        yamabe_geometry_free(geo);
        yamabe_profile_free(prof);
        yamabe_params_free(p);
    }
    // R(0) = alpha (1-m) = 2 beta + rho
    assert!((origin.scalar_curvature - 7.0).abs() < 1e-4);
    assert!((origin.k0 - origin.k1).abs() < 1e-6);
    assert!(k1.iter().all(|&k| k > 0.0));
}

#[test]
fn verify_and_json() {
    let p = shrinking(3.0);
    let mut rep = ptr::null_mut();
    let mut verdict = YamabeVerdict::Fail;
    let mut failed = usize::MAX;
    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(yamabe_verify(p, 1e4, ptr::null(), false, &mut rep), YamabeStatus::Ok);
        assert_eq!(yamabe_report_overall(rep, &mut verdict), YamabeStatus::Ok);
        assert_eq!(yamabe_report_failed_invariants(rep, &mut failed), YamabeStatus::Ok);
        assert_eq!(yamabe_report_json(rep, &mut json), YamabeStatus::Ok);
    }
    assert_eq!(verdict, YamabeVerdict::Pass);
    assert_eq!(failed, 0);
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    assert!(text.contains("\"overall\": \"Pass\""));
    unsafe {
        yamabe_string_free(json);
        yamabe_report_free(rep);
        yamabe_params_free(p);
    }

    let boundary = shrinking(1.0);
    let mut rep = ptr::null_mut();
    let bad = YamabeSettings {
        rtol: -1.0,
        ..yamabe_settings_default()
    };
    unsafe {
        assert_eq!(
            yamabe_verify(boundary, 1e4, ptr::null(), false, &mut rep),
            YamabeStatus::OutsideTheorems
        );
        assert_eq!(
            yamabe_verify(boundary, 1e4, &bad, true, &mut rep),
            YamabeStatus::InvalidArgument
        );
        assert_eq!(
            yamabe_verify(boundary, 1e3, ptr::null(), true, &mut rep),
            YamabeStatus::Ok
        );
        yamabe_report_free(rep);
        yamabe_params_free(boundary);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(yamabe_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
