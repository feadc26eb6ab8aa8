use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use reachflow_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(rf_last_error_message()) }.to_str().unwrap().to_string()
}

fn domain(json: &str) -> *mut RfDomain {
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { rf_domain_from_json(c(json).as_ptr(), &mut d) }, RfStatus::Ok, "{}", last_error());
    d
}

#[test]
fn domain_queries() {
    let d = domain(r#"{"kind": "circle", "center": [0, 0], "radius": 2}"#);
    let (mut dim, mut reach, mut dist) = (0usize, 0.0, 0.0);
    let mut p = [0.0; 2];
    unsafe {
        assert_eq!(rf_domain_dim(d, &mut dim), RfStatus::Ok);
        assert_eq!(rf_domain_reach(d, &mut reach), RfStatus::Ok);
        assert_eq!(rf_domain_distance(d, [0.0, 1.5].as_ptr(), 2, &mut dist), RfStatus::Ok);
        assert_eq!(rf_domain_project(d, [0.0, 1.5].as_ptr(), 2, p.as_mut_ptr()), RfStatus::Ok);
        assert_eq!(rf_domain_project(d, [0.0, 0.0].as_ptr(), 2, p.as_mut_ptr()), RfStatus::OutsideReachTube);
        rf_domain_free(d);
    }
    assert_eq!((dim, reach, dist), (2, 2.0, 0.5));
    assert!(last_error().contains("reach tube"));

    let line = domain(r#"{"kind": "interval_union", "intervals": [[-1, 1]]}"#);
    let mut r = 0.0;
    unsafe {
        assert_eq!(rf_domain_reach(line, &mut r), RfStatus::Ok);
        assert_eq!(rf_domain_distance(line, [0.0, 0.0].as_ptr(), 2, &mut r), RfStatus::DimensionMismatch);
        rf_domain_free(line);
    }
}

#[test]
fn invalid_inputs_are_reported() {
    let mut d = ptr::null_mut();
    unsafe {
        assert_eq!(rf_domain_from_json(ptr::null(), &mut d), RfStatus::NullPointer);
        assert_eq!(rf_domain_from_json(c("{").as_ptr(), &mut d), RfStatus::Parse);
        assert_eq!(
            rf_domain_from_json(c(r#"{"kind": "disc", "center": [0, 0], "radius": -1}"#).as_ptr(), &mut d),
            RfStatus::InvalidDomain
        );
        assert_eq!(rf_domain_from_json([0xffu8, 0].as_ptr().cast(), &mut d), RfStatus::InvalidUtf8);
        assert!(d.is_null());
        let mut w = ptr::null_mut();
        assert_eq!(
            rf_potential_from_json(c(r#"{"kind": "inverse_quadratic", "sign": 2, "scale": 1}"#).as_ptr(), &mut w),
            RfStatus::InvalidPotential
        );
        let mut out = 0.0;
        assert_eq!(rf_w2([0.0].as_ptr(), [0.0].as_ptr(), 1, 0, &mut out), RfStatus::InvalidPoint);
        assert_eq!(rf_domain_reach(ptr::null(), &mut out), RfStatus::NullPointer);
        rf_domain_free(ptr::null_mut());
    }
}

#[test]
fn potential_matches_core() {
    let mut w = ptr::null_mut();
    let x = [0.3, -0.4];
    let (mut v, mut g) = (0.0, [0.0; 2]);
    unsafe {
        let json = c(r#"{"kind": "inverse_quadratic", "sign": -1, "scale": 1}"#);
        assert_eq!(rf_potential_from_json(json.as_ptr(), &mut w), RfStatus::Ok);
        assert_eq!(rf_potential_eval(w, x.as_ptr(), 2, &mut v), RfStatus::Ok);
        assert_eq!(rf_potential_grad(w, x.as_ptr(), 2, g.as_mut_ptr()), RfStatus::Ok);
        rf_potential_free(w);
    }
    let core = reachflow::Potential::InverseQuadratic { sign: -1.0, scale: 1.0 };
    let p = reachflow::Point::new2(x[0], x[1]);
    assert_eq!(v, core.eval(&p));
    assert_eq!(g.as_slice(), core.grad(&p).coords());
}

#[test]
fn simulation_matches_core_run() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/scenarios/fig2.json");
    let json = std::fs::read_to_string(path).unwrap();
    let mut sim = ptr::null_mut();
    let mut term = RfTermination::NotRun;
    let (mut n, mut dim, mut steps) = (0usize, 0usize, 0usize);
    let (mut time, mut energy, mut grad) = (0.0, 0.0, 0.0);
    let mut before = vec![0.0; 100];
    let mut after = vec![0.0; 100];
    unsafe {
        assert_eq!(rf_simulation_from_json(c(&json).as_ptr(), &mut sim), RfStatus::Ok);
        assert_eq!(rf_simulation_summary(sim, &mut steps, &mut time, &mut energy, &mut grad), RfStatus::InvalidConfig);
        assert_eq!(rf_simulation_shape(sim, &mut n, &mut dim), RfStatus::Ok);
        assert_eq!(rf_simulation_positions(sim, before.as_mut_ptr(), before.len()), RfStatus::Ok);
        assert_eq!(rf_simulation_run(sim, &mut term), RfStatus::Ok);
        assert_eq!(rf_simulation_positions(sim, after.as_mut_ptr(), after.len()), RfStatus::Ok);
        assert_eq!(rf_simulation_positions(sim, after.as_mut_ptr(), 99), RfStatus::BufferTooSmall);
        assert_eq!(rf_simulation_summary(sim, &mut steps, &mut time, &mut energy, &mut grad), RfStatus::Ok);
        rf_simulation_free(sim);
    }
    assert_eq!((n, dim, term), (100, 1, RfTermination::Converged));

    let scenario = reachflow::experiments::Scenario::from_json(&json).unwrap();
    let run = scenario.run().unwrap();
    let coords = |s: &reachflow::ParticleState| s.positions.iter().map(|p| p.x()).collect::<Vec<_>>();
    assert_eq!(before, coords(&run.initial));
    assert_eq!(after, coords(&run.trace.final_state));
    let last = run.trace.last();
    assert_eq!((steps, time, energy, grad), (last.step, last.time, last.energy, last.grad_norm));
}

#[test]
fn w2_matches_core() {
    let a = [0.0, 0.0, 1.0, 0.0, 0.0, 2.0];
    let b = [1.0, 1.0, 0.5, 0.0, -1.0, 2.0];
    let mut d = 0.0;
    unsafe { assert_eq!(rf_w2(a.as_ptr(), b.as_ptr(), 3, 2, &mut d), RfStatus::Ok) };
    let pts = |v: &[f64]| v.chunks(2).map(|c| reachflow::Point::new2(c[0], c[1])).collect::<Vec<_>>();
    assert_eq!(d, reachflow::wasserstein::w2_bruteforce(&pts(&a), &pts(&b)).unwrap());
}

#[test]
fn header_is_current_and_usable_from_c() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(crate_dir.join("include/reachflow.h")).unwrap();
    for name in ["rf_domain_from_json", "rf_simulation_run", "rf_w2", "RF_STATUS_OUTSIDE_REACH_TUBE"] {
        assert!(header.contains(name), "{name} missing from header");
    }

    // The static library sits next to this test binary in target/<profile>/deps.
    let deps = std::env::current_exe().unwrap().parent().unwrap().to_path_buf();
    let lib = deps.join("libreachflow_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new(std::env::var("CC").unwrap_or_else(|_| "cc".into()))
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("a C compiler is available");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok 0.1.0"));
}
