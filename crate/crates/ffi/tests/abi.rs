use std::ffi::{c_char, CStr, CString};
use std::ptr;

use qgrand_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(qg_last_error()) }.to_string_lossy().into_owned()
}

fn build(n: usize, k: usize, gates: usize, seed: u64) -> *mut QgCode {
    let mut code = ptr::null_mut();
    assert_eq!(unsafe { qg_code_build(n, k, gates, seed, &mut code) }, QgStatus::Ok);
    assert!(!code.is_null());
    code
}

fn stabilizer(code: *const QgCode, i: usize) -> String {
    let mut buf = [0 as c_char; 64];
    let mut written = 0;
    let st = unsafe { qg_code_stabilizer(code, i, buf.as_mut_ptr(), buf.len(), &mut written) };
    assert_eq!(st, QgStatus::Ok);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_str().unwrap().to_owned()
}

#[test]
fn build_accessors_and_free() {
    let code = build(8, 3, 60, 11);
    unsafe {
        assert_eq!(qg_code_n(code), 8);
        assert_eq!(qg_code_k(code), 3);
        assert_eq!(qg_code_num_gates(code), 60);
        assert_eq!(qg_code_seed(code), 11);
        assert_eq!(qg_code_n(ptr::null()), 0);
        qg_code_free(code);
        qg_code_free(ptr::null_mut());
    }
}

#[test]
fn invalid_sizes_report_validation() {
    let mut code = ptr::null_mut();
    let st = unsafe { qg_code_build(1, 1, 0, 0, &mut code) };
    assert_eq!(st, QgStatus::Validation);
    assert!(code.is_null());
    assert!(!last_error().is_empty());
    let st = unsafe { qg_code_build(4, 1, 0, 0, ptr::null_mut()) };
    assert_eq!(st, QgStatus::InvalidArgument);
}

#[test]
fn trivial_code_evaluation_and_decoding() {
    let code = build(2, 1, 0, 0);
    assert_eq!(stabilizer(code, 0), "+IZ");
    let mut noise = ptr::null_mut();
    assert_eq!(unsafe { qg_noise_bernoulli(2, 0.3, 1, &mut noise) }, QgStatus::Ok);
    unsafe {
        assert_eq!(qg_noise_len(noise), 7);
        assert!((qg_noise_residual(noise) - 0.09).abs() < 1e-12);
    }
    let mut summary = QgEvalSummary::default();
    assert_eq!(unsafe { qg_evaluate(code, noise, &mut summary) }, QgStatus::Ok);
    assert!((summary.success_prob - 0.56).abs() < 1e-12);
    assert!((summary.bler - 0.44).abs() < 1e-12);
    assert!((summary.f_by_weight[1] - 1.0 / 6.0).abs() < 1e-12);
    assert!(summary.f_by_weight[0].is_nan() && summary.f_by_weight[2].is_nan());

    let mut bits = [0u8; 1];
    let e = CString::new("IX").unwrap();
    assert_eq!(unsafe { qg_code_syndrome(code, e.as_ptr(), bits.as_mut_ptr(), 1) }, QgStatus::Ok);
    assert_eq!(bits, [1]);

    let mut table = ptr::null_mut();
    assert_eq!(unsafe { qg_table_build(code, noise, QG_UNLIMITED, &mut table) }, QgStatus::Ok);
    assert_eq!(unsafe { qg_table_occupied(table) }, 2);
    let (mut kind, mut index) = (QgDecodeKind::Abandoned, 99u64);
    let st = unsafe { qg_table_decode(table, bits.as_ptr(), 1, QG_UNLIMITED, &mut kind, &mut index) };
    assert_eq!(st, QgStatus::Ok);
    assert_eq!((kind, index), (QgDecodeKind::Corrected, 4));
    let zero = [0u8];
    unsafe { qg_table_decode(table, zero.as_ptr(), 1, QG_UNLIMITED, &mut kind, &mut index) };
    assert_eq!(kind, QgDecodeKind::NoError);
    unsafe { qg_table_decode(table, bits.as_ptr(), 1, 0, &mut kind, &mut index) };
    assert_eq!(kind, QgDecodeKind::Abandoned);
    let st = unsafe { qg_table_decode(table, bits.as_ptr(), 2, QG_UNLIMITED, &mut kind, &mut index) };
    assert_eq!(st, QgStatus::InvalidArgument);

    let mut cost = QgMeasurementCost::default();
    assert_eq!(unsafe { qg_measurement_cost(1, noise, &mut cost) }, QgStatus::Ok);
    assert!(cost.total <= cost.bound);
    unsafe {
        qg_table_free(table);
        qg_noise_free(noise);
        qg_code_free(code);
    }
}

#[test]
fn small_buffer_reports_required_length() {
    let code = build(6, 2, 30, 4);
    let mut buf = [0 as c_char; 3];
    let mut written = 0;
    let st = unsafe { qg_code_stabilizer(code, 0, buf.as_mut_ptr(), buf.len(), &mut written) };
    assert_eq!(st, QgStatus::InvalidArgument);
    assert_eq!(written, 7);
    let st = unsafe { qg_code_stabilizer(code, 4, buf.as_mut_ptr(), buf.len(), &mut written) };
    assert_eq!(st, QgStatus::Validation);
    unsafe { qg_code_free(code) };
}

#[test]
fn save_and_load_round_trip() {
    let dir = std::env::temp_dir().join(format!("qgrand-ffi-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = CString::new(dir.join("c.qrlc").to_str().unwrap()).unwrap();
    let code = build(10, 4, 120, 5);
    assert_eq!(unsafe { qg_code_save(code, path.as_ptr()) }, QgStatus::Ok);
    let mut loaded = ptr::null_mut();
    assert_eq!(unsafe { qg_code_load(path.as_ptr(), &mut loaded) }, QgStatus::Ok);
    for i in 0..6 {
        assert_eq!(stabilizer(code, i), stabilizer(loaded, i));
    }
    let missing = CString::new(dir.join("missing.qrlc").to_str().unwrap()).unwrap();
    let mut none = ptr::null_mut();
    assert_eq!(unsafe { qg_code_load(missing.as_ptr(), &mut none) }, QgStatus::Io);
    unsafe {
        qg_code_free(code);
        qg_code_free(loaded);
    }
    std::fs::remove_dir_all(dir).ok();
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/qgrand.h");
    let text = std::fs::read_to_string(header).unwrap();
    for f in ["qg_code_build", "qg_table_decode", "qg_evaluate", "qg_last_error", "QG_STATUS_PANIC"] {
        assert!(text.contains(f), "{f} missing from header");
    }
    let Ok(status) = std::process::Command::new("cc")
        .args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header])
        .status()
    else {
        eprintln!("no C compiler available; syntax check skipped");
        return;
    };
    assert!(status.success());
}
