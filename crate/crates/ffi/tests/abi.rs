use std::ffi::{CStr, CString};
use std::ptr;

use mermin_ffi::*;

fn last_error() -> String {
    let p = mermin_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn group(factors: &[u64]) -> *mut MerminGroup {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { mermin_group_new(factors.as_ptr(), factors.len(), &mut g) }, MerminStatus::Ok);
    g
}

#[test]
fn extension_witness_round_trip() {
    let g = group(&[4]);
    let mut order = 0;
    assert_eq!(unsafe { mermin_group_order(g, &mut order) }, MerminStatus::Ok);
    assert_eq!(order, 4);
    let (mut trivial, mut witness) = (true, ptr::null_mut());
    let st = unsafe { mermin_ext_check(g, [2i64].as_ptr(), 1, &mut trivial, &mut witness) };
    assert_eq!(st, MerminStatus::Ok);
    assert!(!trivial);
    assert_eq!(unsafe { CStr::from_ptr(witness) }.to_str().unwrap(), "2x=2");
    unsafe {
        mermin_string_free(witness);
        mermin_group_free(g);
    }
}

#[test]
fn frel_locality_is_trivial() {
    let (g, h) = (group(&[2, 2]), group(&[3]));
    let mut trivial = false;
    assert_eq!(unsafe { mermin_frel_locality(g, h, &mut trivial) }, MerminStatus::Ok);
    assert!(trivial);
    unsafe {
        mermin_group_free(g);
        mermin_group_free(h);
    }
}

#[test]
fn error_codes_and_messages() {
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { mermin_group_new([0u64].as_ptr(), 1, &mut g) }, MerminStatus::InvalidArgument);
    assert!(g.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { mermin_group_new(ptr::null(), 2, &mut g) }, MerminStatus::NullPointer);
    assert!(last_error().contains("factors"));

    let mut eff = false;
    let mut res = 0.0;
    let bad = CString::new("not a phase").unwrap();
    assert_eq!(unsafe { mermin_newcond(2, 3, 2, bad.as_ptr(), 1e-9, &mut eff, &mut res) }, MerminStatus::Parse);

    let mut count = 0;
    let policy = CString::new("canonical").unwrap();
    assert_eq!(
        unsafe { mermin_pairs_count(3, 2, 1 << 20, policy.as_ptr(), 1e-9, 16, &mut count) },
        MerminStatus::Resource
    );
    // A successful call clears the message.
    let b = CString::new("1/4").unwrap();
    assert_eq!(unsafe { mermin_newcond(2, 3, 2, b.as_ptr(), 1e-9, &mut eff, &mut res) }, MerminStatus::Ok);
    assert!(mermin_last_error_message().is_null());
    assert!(eff && res < 1e-9);
}

#[test]
fn pairs_and_lhv() {
    let mut count = 0;
    let policy = CString::new("canonical").unwrap();
    assert_eq!(unsafe { mermin_pairs_count(3, 2, 4, policy.as_ptr(), 1e-9, 1 << 20, &mut count) }, MerminStatus::Ok);
    assert_eq!(count, 1);

    let mut s = ptr::null_mut();
    let name = CString::new("classic-322").unwrap();
    assert_eq!(unsafe { mermin_scenario_preset(name.as_ptr(), &mut s) }, MerminStatus::Ok);
    let mode = CString::new("parity").unwrap();
    let (mut exists, mut json) = (7, ptr::null_mut());
    assert_eq!(unsafe { mermin_lhv_check(s, mode.as_ptr(), 1e-9, 1 << 20, &mut exists, &mut json) }, MerminStatus::Ok);
    assert_eq!(exists, 0);
    let v: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(json) }.to_str().unwrap()).unwrap();
    assert_eq!(v["certificate"]["modulus"], 2);
    unsafe {
        mermin_string_free(json);
        mermin_scenario_free(s);
    }

    let local = CString::new(r#"{"D":2,"N":2,"rows":[[[[0,1]],[[1,2]]],[[[1,2]],[[0,1]]]]}"#).unwrap();
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { mermin_scenario_from_json(local.as_ptr(), &mut s) }, MerminStatus::Ok, "{}", last_error());
    let mode = CString::new("possibilistic").unwrap();
    assert_eq!(unsafe { mermin_lhv_check(s, mode.as_ptr(), 1e-9, 1 << 20, &mut exists, ptr::null_mut()) }, MerminStatus::Ok);
    assert_eq!(exists, 1);
    unsafe { mermin_scenario_free(s) };
}

#[test]
fn qss_json() {
    let cfg = CString::new(
        r#"{"N":3,"D":2,"alphabet":[[[[0,1]],[[1,4]]],[[[0,1]],[[1,4]]],[[[0,1]],[[1,4]]],[[[0,1]],[[1,4]]]],"seed":3,"rounds":2000,"tv_threshold":0.05,"min_rounds":100}"#,
    )
    .unwrap();
    for attack in ["none", "withhold:1", "pre-phase"] {
        let a = CString::new(attack).unwrap();
        let mut out = ptr::null_mut();
        let st = unsafe { mermin_qss_run_json(cfg.as_ptr(), a.as_ptr(), 1e-9, &mut out) };
        assert_eq!(st, MerminStatus::Ok, "{attack}: {}", last_error());
        let v: serde_json::Value = serde_json::from_str(unsafe { CStr::from_ptr(out) }.to_str().unwrap()).unwrap();
        if attack == "none" {
            assert_eq!(v["accuracy"], 1.0);
        }
        unsafe { mermin_string_free(out) };
    }
    let a = CString::new("bribe").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { mermin_qss_run_json(cfg.as_ptr(), a.as_ptr(), 1e-9, &mut out) }, MerminStatus::InvalidArgument);
    assert!(out.is_null());
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/mermin.h")).unwrap();
    let src = include_str!("../src/lib.rs");
    let exports: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|l| l.split('(').next().unwrap())
        .collect();
    assert!(exports.len() >= 14);
    for f in exports {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    for item in ["typedef struct MerminGroup MerminGroup;", "typedef struct MerminScenario MerminScenario;", "MERMIN_STATUS_PANIC = 6"] {
        assert!(header.contains(item), "{item}");
    }
}

#[test]
fn header_compiles_as_c() {
    let Ok(cc) = std::process::Command::new("cc").arg("--version").output() else {
        eprintln!("no C compiler; skipping");
        return;
    };
    assert!(cc.status.success());
    let dir = tempfile::tempdir().unwrap();
    let main = dir.path().join("main.c");
    std::fs::write(&main, "#include \"mermin.h\"\nint main(void) { return mermin_version() == 0; }\n").unwrap();
    let out = std::process::Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only"])
        .arg(concat!("-I", env!("CARGO_MANIFEST_DIR"), "/include"))
        .arg(&main)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
