use std::ffi::{CStr, CString};
use std::process::Command;
use std::ptr;

use paraprod_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn symbol(spec: &str, depth: u32) -> *mut PpSymbol {
    let mut s = ptr::null_mut();
    let st = unsafe { pp_symbol_generate(cstr(spec).as_ptr(), depth, &mut s) };
    assert_eq!(st, PpStatus::Ok);
    s
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(pp_last_error_message()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn worked_instance_through_the_abi() {
    let b = symbol("const:1", 2);
    let d = symbol("const:1", 2);
    let mut report = ptr::null_mut();
    let mut v = PpConditions::default();
    unsafe {
        assert_eq!(pp_conditions(b, d, &mut report), PpStatus::Ok);
        assert_eq!(pp_report_values(report, &mut v), PpStatus::Ok);
    }
    assert_eq!((v.depth, v.a, v.c), (2, 0.0, 0.0));
    assert!((v.b - 2f64.sqrt()).abs() < 1e-12);
    assert!((v.op_norm - 2.0 * 2f64.sqrt()).abs() < 1e-9);
    assert!((v.ratio - 2.0).abs() < 1e-9);

    let mut json = ptr::null_mut();
    unsafe {
        assert_eq!(pp_report_json(report, &mut json), PpStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        assert!(text.contains("\"witness_B\": \"0:0\""));
        pp_string_free(json);
        pp_report_free(report);
        pp_symbol_free(b);
        pp_symbol_free(d);
    }
}

#[test]
fn zero_symbol_reports_nan_ratio() {
    let b = symbol("zero", 3);
    let d = symbol("random:seed=4", 3);
    let mut report = ptr::null_mut();
    let mut v = PpConditions::default();
    unsafe {
        assert_eq!(pp_conditions(b, d, &mut report), PpStatus::Ok);
        assert_eq!(pp_report_values(report, &mut v), PpStatus::Ok);
        pp_report_free(report);
        pp_symbol_free(b);
        pp_symbol_free(d);
    }
    assert_eq!(v.op_norm, 0.0);
    assert!(v.ratio.is_nan());
}

#[test]
fn gram_matrices_and_norm() {
    let b = symbol("random:seed=1", 4);
    let d = symbol("random:seed=2", 4);
    let mut mats = [ptr::null_mut(); 4];
    let kinds = [
        PpGramKind::CompositionClosed,
        PpGramKind::CompositionDirect,
        PpGramKind::TransplantClosed,
        PpGramKind::TransplantDirect,
    ];
    unsafe {
        for (k, m) in kinds.iter().zip(mats.iter_mut()) {
            assert_eq!(pp_gram(b, d, *k, m), PpStatus::Ok);
        }
        let n = pp_matrix_dim(mats[0]);
        assert_eq!(n, 31);
        for r in 0..n {
            for c in 0..n {
                let mut e = [(0.0, 0.0); 4];
                for (m, x) in mats.iter().zip(e.iter_mut()) {
                    assert_eq!(pp_matrix_get(*m, r, c, &mut x.0, &mut x.1), PpStatus::Ok);
                }
                assert!((e[0].0 - e[1].0).abs() < 1e-12 && (e[0].1 - e[1].1).abs() < 1e-12);
                assert!((e[2].0 - 2.0 * e[0].0).abs() < 1e-12);
                assert!((e[3].0 - e[2].0).abs() < 1e-12);
            }
        }
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(pp_matrix_get(mats[0], n, 0, &mut re, &mut im), PpStatus::InvalidArgument);
        let (mut p, mut t) = (0.0, 0.0);
        assert_eq!(pp_matrix_norm(mats[0], &mut p), PpStatus::Ok);
        assert_eq!(pp_matrix_norm(mats[2], &mut t), PpStatus::Ok);
        assert!((t - 2.0 * p).abs() < 1e-9 * t);
        for m in mats {
            pp_matrix_free(m);
        }
        pp_symbol_free(b);
        pp_symbol_free(d);
    }
}

#[test]
fn symbol_values_round_trip_through_a_file() {
    let re: Vec<f64> = (0..7).map(|i| i as f64 * 0.5).collect();
    let im: Vec<f64> = (0..7).map(|i| -(i as f64)).collect();
    let dir = tempfile::tempdir().unwrap();
    let path = cstr(dir.path().join("s.json").to_str().unwrap());
    let mut s = ptr::null_mut();
    let mut back = ptr::null_mut();
    unsafe {
        assert_eq!(pp_symbol_from_values(2, re.as_ptr(), im.as_ptr(), 7, &mut s), PpStatus::Ok);
        assert_eq!(pp_symbol_len(s), 7);
        assert_eq!(pp_symbol_depth(s), 2);
        assert_eq!(pp_symbol_save(s, path.as_ptr()), PpStatus::Ok);
        assert_eq!(pp_symbol_load(path.as_ptr(), &mut back), PpStatus::Ok);
        for i in 0..7 {
            let (mut x, mut y) = (0.0, 0.0);
            assert_eq!(pp_symbol_get(back, i, &mut x, &mut y), PpStatus::Ok);
            assert_eq!((x, y), (re[i], im[i]));
        }
        let mut h1 = [0 as std::ffi::c_char; 17];
        let mut h2 = [0 as std::ffi::c_char; 17];
        assert_eq!(pp_symbol_hash(s, h1.as_mut_ptr(), 17), PpStatus::Ok);
        assert_eq!(pp_symbol_hash(back, h2.as_mut_ptr(), 17), PpStatus::Ok);
        assert_eq!(h1, h2);
        assert_eq!(pp_symbol_hash(s, h1.as_mut_ptr(), 16), PpStatus::InvalidArgument);
        pp_symbol_free(s);
        pp_symbol_free(back);
    }
}

#[test]
fn error_codes_and_messages() {
    let mut s = ptr::null_mut();
    unsafe {
        assert_eq!(pp_symbol_generate(ptr::null(), 2, &mut s), PpStatus::NullPointer);
        assert_eq!(
            pp_symbol_generate(cstr("nonsense").as_ptr(), 2, &mut s),
            PpStatus::ParseError
        );
        assert!(last_error().contains("nonsense"));
        assert!(s.is_null());
        assert_eq!(
            pp_symbol_generate(cstr("zero").as_ptr(), 99, &mut s),
            PpStatus::InvalidArgument
        );
        assert_eq!(
            pp_symbol_load(cstr("/nonexistent/s.json").as_ptr(), &mut s),
            PpStatus::IoError
        );
        let re = [1.0; 5];
        assert_eq!(
            pp_symbol_from_values(2, re.as_ptr(), ptr::null(), 5, &mut s),
            PpStatus::InvalidArgument
        );

        let b = symbol("log", 2);
        let d = symbol("log", 3);
        let mut r = ptr::null_mut();
        assert_eq!(pp_conditions(b, d, &mut r), PpStatus::DepthMismatch);
        assert!(last_error().contains("depth"));
        assert_eq!(pp_conditions(b, ptr::null(), &mut r), PpStatus::NullPointer);
        pp_symbol_free(b);
        pp_symbol_free(d);
        pp_symbol_free(ptr::null_mut());
        assert_eq!(pp_symbol_depth(ptr::null()), 0);
    }
}

#[test]
fn generated_header_declares_the_api() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/paraprod.h");
    let text = std::fs::read_to_string(header).unwrap();
    for name in [
        "typedef struct PpSymbol PpSymbol",
        "typedef struct PpReport PpReport",
        "typedef struct PpMatrix PpMatrix",
        "PP_STATUS_OK = 0",
        "pp_symbol_generate",
        "pp_conditions",
        "pp_gram",
        "pp_matrix_norm",
        "pp_last_error_message",
    ] {
        assert!(text.contains(name), "{name}");
    }
    if let Ok(out) = Command::new("cc").args(["-fsyntax-only", "-x", "c", header]).output() {
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
}
