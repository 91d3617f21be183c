use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use kamrfp_ffi::*;

const TWO_BRANCH_B4: &str = "p max 3 6\nn 1 s\nn 3 t\na 1 2 1\na 1 2 1\na 1 2 1\na 1 2 1\na 2 3 4\na 2 3 4\n";

fn take(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { kamrfp_string_free(s) };
    out
}

fn last_error() -> String {
    let p = kamrfp_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn parse(text: &str, format: KamrfpFormat) -> (KamrfpStatus, *mut KamrfpNetwork) {
    let c = CString::new(text).unwrap();
    let mut net = ptr::null_mut();
    let st = unsafe { kamrfp_network_parse(c.as_ptr(), format as u32, &mut net) };
    (st, net)
}

#[test]
fn solve_through_handles() {
    let (st, net) = parse(TWO_BRANCH_B4, KamrfpFormat::Dimacs);
    assert_eq!(st, KamrfpStatus::Ok);
    unsafe {
        assert_eq!(kamrfp_network_vertex_count(net), 3);
        assert_eq!(kamrfp_network_arc_count(net), 6);

        let mut sol = ptr::null_mut();
        assert_eq!(kamrfp_solve(net, 1, ptr::null(), &mut sol), KamrfpStatus::Ok);
        let mut s = ptr::null_mut();
        assert_eq!(kamrfp_solution_fstar(sol, &mut s), KamrfpStatus::Ok);
        assert_eq!(take(s), "4");
        assert_eq!(kamrfp_solution_theta(sol, &mut s), KamrfpStatus::Ok);
        assert_eq!(take(s), "2");
        assert_eq!(kamrfp_solution_loss(sol, &mut s), KamrfpStatus::Ok);
        assert_eq!(take(s), "2");
        for (arc, want) in [(1, "1"), (5, "2"), (6, "2")] {
            assert_eq!(kamrfp_solution_flow_value(sol, arc, &mut s), KamrfpStatus::Ok);
            assert_eq!(take(s), want);
        }
        assert_eq!(kamrfp_solution_flow_value(sol, 7, &mut s), KamrfpStatus::OutOfRange);
        assert!(kamrfp_solution_certified(sol));
        let mut buf = [0usize; 2];
        assert_eq!(kamrfp_solution_worst_attack(sol, buf.as_mut_ptr(), 2), 1);
        assert_eq!(buf[0], 5);
        assert_eq!(kamrfp_solution_worst_attack(sol, ptr::null_mut(), 0), 1);

        assert_eq!(kamrfp_solution_to_json(sol, &mut s), KamrfpStatus::Ok);
        let doc: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(doc["theta"], "2");
        assert_eq!(doc["variables"], 44);
        kamrfp_solution_free(sol);
        kamrfp_network_free(net);
    }
}

#[test]
fn combined_mode_and_options() {
    let (_, net) = parse(TWO_BRANCH_B4, KamrfpFormat::Dimacs);
    let mut opts = kamrfp_solve_options_default();
    opts.mode = KamrfpMode::Combined as u32;
    opts.certify = false;
    unsafe {
        let mut sol = ptr::null_mut();
        assert_eq!(kamrfp_solve(net, 1, &opts, &mut sol), KamrfpStatus::Ok);
        assert!(!kamrfp_solution_certified(sol));
        assert_eq!(kamrfp_solution_worst_attack(sol, ptr::null_mut(), 0), 0);
        let mut s = ptr::null_mut();
        kamrfp_solution_theta(sol, &mut s);
        assert_eq!(take(s), "2");
        kamrfp_solution_free(sol);

        opts.mode = 9;
        assert_eq!(kamrfp_solve(net, 1, &opts, &mut sol), KamrfpStatus::InvalidArgument);
        assert!(sol.is_null());

        opts = kamrfp_solve_options_default();
        opts.max_vars = 10;
        assert_eq!(kamrfp_solve(net, 3, &opts, &mut sol), KamrfpStatus::BudgetExceeded);
        assert!(last_error().contains("--max-vars"));
        kamrfp_network_free(net);
    }
}

#[test]
fn error_codes() {
    let (st, net) = parse("p max 3 1\nn 1 s\nn 3 t\na 1 9 1\n", KamrfpFormat::Dimacs);
    assert_eq!(st, KamrfpStatus::InvalidInput);
    assert!(net.is_null());
    assert!(!last_error().is_empty());

    let (st, _) = parse(TWO_BRANCH_B4, KamrfpFormat::Json);
    assert_eq!(st, KamrfpStatus::InvalidInput);

    let c = CString::new(TWO_BRANCH_B4).unwrap();
    let mut net = ptr::null_mut();
    assert_eq!(unsafe { kamrfp_network_parse(c.as_ptr(), 5, &mut net) }, KamrfpStatus::InvalidArgument);
    assert_eq!(unsafe { kamrfp_network_parse(ptr::null(), 0, &mut net) }, KamrfpStatus::NullPointer);
    assert_eq!(unsafe { kamrfp_network_parse(c.as_ptr(), 0, ptr::null_mut()) }, KamrfpStatus::NullPointer);

    unsafe {
        let mut sol = ptr::null_mut();
        assert_eq!(kamrfp_solve(ptr::null(), 1, ptr::null(), &mut sol), KamrfpStatus::NullPointer);
        let mut s = ptr::null_mut();
        assert_eq!(kamrfp_solution_theta(ptr::null(), &mut s), KamrfpStatus::NullPointer);
        assert!(!kamrfp_solution_certified(ptr::null()));
        assert_eq!(kamrfp_network_arc_count(ptr::null()), 0);
        kamrfp_network_free(ptr::null_mut());
        kamrfp_solution_free(ptr::null_mut());
        kamrfp_string_free(ptr::null_mut());
    }
}

#[test]
fn attack_reports() {
    let (_, net) = parse(TWO_BRANCH_B4, KamrfpFormat::Dimacs);
    let mut s = ptr::null_mut();
    unsafe {
        let naive = CString::new("f 1 1\nf 2 1\nf 3 1\nf 4 1\nf 5 4\n").unwrap();
        assert_eq!(kamrfp_attack(net, naive.as_ptr(), 1, 1000, &mut s), KamrfpStatus::Ok);
        let doc: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(doc["loss"], "4");
        assert_eq!(doc["worst_attack"], serde_json::json!([5]));

        let broken = CString::new("f 1 1\nf 2 1\nf 3 1\nf 4 1\nf 5 2\nf 6 1\n").unwrap();
        assert_eq!(kamrfp_attack(net, broken.as_ptr(), 1, 1000, &mut s), KamrfpStatus::InvalidInput);
        assert!(s.is_null());
        assert!(last_error().contains("vertex 2"), "{}", last_error());

        let ok = CString::new("f 1 1\nf 2 1\nf 3 1\nf 4 1\nf 5 2\nf 6 2\n").unwrap();
        assert_eq!(kamrfp_attack(net, ok.as_ptr(), 3, 5, &mut s), KamrfpStatus::BudgetExceeded);
        kamrfp_network_free(net);
    }
}

#[test]
fn version_is_static() {
    let v = unsafe { CStr::from_ptr(kamrfp_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

/// Compiles the C smoke test against the generated header and static library
/// when a C compiler and the archive are available.
#[test]
fn c_header_smoke() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(|p| p.parent()).unwrap().to_path_buf();
    let archive = profile_dir.join("libkamrfp_ffi.a");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if !archive.exists() || Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or no {}", archive.display());
        return;
    }
    let out_bin = profile_dir.join("kamrfp_c_smoke");
    let status = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(manifest.join("tests/c_smoke.c"))
        .arg(&archive)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out_bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let run = Command::new(&out_bin).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout).trim(), "ok");
}
