use std::ffi::CStr;
use std::path::Path;
use std::process::Command;
use std::ptr;

use opsplit_ffi::*;

fn last_error() -> String {
    let p = opsplit_last_error();
    assert!(!p.is_null(), "expected an error message");
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn optimal_prs_step() {
    let (mut tau, mut rate) = (0.0, 0.0);
    let st = unsafe {
        opsplit_optimal(
            OpsplitSetting::Cocoercive as i32,
            OpsplitAlgorithm::Prs as i32,
            1.0,
            1.0,
            0.3,
            &mut tau,
            &mut rate,
        )
    };
    assert_eq!(st, OpsplitStatus::Ok);
    assert!((tau - (1.0f64 / 0.3).sqrt()).abs() < 1e-12);
    assert!((rate - 0.54060).abs() < 5e-5);

    let mut r = 0.0;
    let st = unsafe { opsplit_rate(1, OpsplitAlgorithm::Prs as i32, 1.0, 1.0, 0.3, tau, &mut r) };
    assert_eq!(st, OpsplitStatus::Ok);
    assert!((r - 0.29222).abs() < 5e-5);
}

#[test]
fn infinite_beta_and_status_codes() {
    let mut r = 0.0;
    let st = unsafe { opsplit_rate(0, OpsplitAlgorithm::Ea as i32, 1.0, f64::INFINITY, 0.5, 1.0, &mut r) };
    assert_eq!(st, OpsplitStatus::Ok);
    assert!((r - 0.5f64.sqrt()).abs() < 1e-12);

    let st = unsafe { opsplit_rate(0, OpsplitAlgorithm::Ea as i32, 1.0, 1.0, 0.3, 5.0, &mut r) };
    assert_eq!(st, OpsplitStatus::StepSize);
    assert!(last_error().contains("admissible"));

    let st = unsafe { opsplit_rate(0, 0, -1.0, 1.0, 0.3, 0.1, &mut r) };
    assert_eq!(st, OpsplitStatus::InvalidArgument);

    let (mut t, mut q) = (0.0, 0.0);
    let st = unsafe { opsplit_optimal(0, OpsplitAlgorithm::Ppa as i32, 1.0, 1.0, 0.3, &mut t, &mut q) };
    assert_eq!(st, OpsplitStatus::NoOptimum);

    let st = unsafe { opsplit_rate(0, 0, 1.0, 1.0, 0.3, 0.1, ptr::null_mut()) };
    assert_eq!(st, OpsplitStatus::NullPointer);

    let st = unsafe { opsplit_eta(2.0, &mut r) };
    assert_eq!(st, OpsplitStatus::Domain);
    let st = unsafe { opsplit_eta(8.0, &mut r) };
    assert_eq!(st, OpsplitStatus::Ok);
    let s = (0.5f64).sqrt();
    assert!((r - (1.0 - s) / (1.0 + s)).abs() < 1e-15);
}

#[test]
fn averaged_constants() {
    let mut mu = 0.0;
    // PRS: tau / (gamma + tau) with gamma = 1/2
    let st = unsafe { opsplit_averaged_constant(OpsplitAlgorithm::Prs as i32, 1.0, 1.0, 0.5, &mut mu) };
    assert_eq!(st, OpsplitStatus::Ok);
    assert!((mu - 0.5).abs() < 1e-15);
}

#[test]
fn classifier_points() {
    let expect = [
        (0.1, OpsplitWinner::Prs, OpsplitRegion::Complement),
        (25.0, OpsplitWinner::Drs, OpsplitRegion::Omega2),
        (1000.0, OpsplitWinner::FbsProxF, OpsplitRegion::Omega1),
    ];
    for (beta, winner, region) in expect {
        let (mut w, mut g) = (-1, -1);
        assert_eq!(unsafe { opsplit_classify(beta, 0.0022, &mut w, &mut g) }, OpsplitStatus::Ok);
        assert_eq!(w, winner as i32, "beta = {beta}");
        assert_eq!(g, region as i32, "beta = {beta}");
    }
    let (mut w, mut g) = (0, 0);
    assert_eq!(unsafe { opsplit_classify(1.0, 1.5, &mut w, &mut g) }, OpsplitStatus::Domain);
}

#[test]
fn denoise_handle_round_trip() {
    let mut cfg = unsafe {
        let mut c = std::mem::MaybeUninit::<OpsplitDenoiseConfig>::uninit();
        assert_eq!(opsplit_denoise_default_config(c.as_mut_ptr()), OpsplitStatus::Ok);
        c.assume_init()
    };
    assert_eq!(cfg.n, 512);
    assert_eq!(cfg.scheme_mask, 0b111111);
    cfg.n = 64;
    cfg.scheme_mask = (1 << OpsplitScheme::Prs as u32) | (1 << OpsplitScheme::Fbs3 as u32);
    cfg.max_iter = 300;

    let mut h: *mut OpsplitExperiment = ptr::null_mut();
    assert_eq!(unsafe { opsplit_denoise_run(&cfg, &mut h) }, OpsplitStatus::Ok);
    assert!(!h.is_null());

    let (mut tau, mut rate, mut hit) = (0.0, 0.0, 0i64);
    let st = unsafe { opsplit_experiment_scheme_info(h, OpsplitScheme::Prs as i32, &mut tau, &mut rate, &mut hit) };
    assert_eq!(st, OpsplitStatus::Ok);
    assert!(tau > 0.0 && rate > 0.0 && rate < 1.0);

    let mut len = 0usize;
    assert_eq!(unsafe { opsplit_experiment_trace_len(h, OpsplitScheme::Prs as i32, &mut len) }, OpsplitStatus::Ok);
    assert!(len >= 2);
    let mut small = vec![0.0; len - 1];
    let st = unsafe { opsplit_experiment_trace_copy(h, OpsplitScheme::Prs as i32, small.as_mut_ptr(), small.len()) };
    assert_eq!(st, OpsplitStatus::BufferTooSmall);
    let mut buf = vec![0.0; len];
    let st = unsafe { opsplit_experiment_trace_copy(h, OpsplitScheme::Prs as i32, buf.as_mut_ptr(), buf.len()) };
    assert_eq!(st, OpsplitStatus::Ok);
    assert!(buf[len - 1] < buf[0]);

    let st = unsafe { opsplit_experiment_trace_len(h, OpsplitScheme::Ea as i32, &mut len) };
    assert_eq!(st, OpsplitStatus::NotFound);

    let mut n = 0usize;
    assert_eq!(unsafe { opsplit_experiment_solution_len(h, &mut n) }, OpsplitStatus::Ok);
    assert_eq!(n, 64);
    let mut sol = vec![0.0; n];
    assert_eq!(unsafe { opsplit_experiment_solution_copy(h, sol.as_mut_ptr(), n) }, OpsplitStatus::Ok);
    assert!(sol.iter().all(|v| v.is_finite()));

    unsafe { opsplit_experiment_free(h) };
    unsafe { opsplit_experiment_free(ptr::null_mut()) };
}

#[test]
fn invalid_configs_are_rejected() {
    let mut cfg = unsafe {
        let mut c = std::mem::MaybeUninit::<OpsplitRestoreConfig>::uninit();
        assert_eq!(opsplit_restore_default_config(c.as_mut_ptr()), OpsplitStatus::Ok);
        c.assume_init()
    };
    cfg.m_rows = 10;
    let mut h: *mut OpsplitExperiment = ptr::null_mut();
    assert_eq!(unsafe { opsplit_restore_run(&cfg, &mut h) }, OpsplitStatus::InvalidArgument);
    assert!(h.is_null());
    assert_eq!(unsafe { opsplit_restore_run(ptr::null(), &mut h) }, OpsplitStatus::NullPointer);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(opsplit_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_compiles_as_c_and_cpp() {
    let header = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/opsplit.h");
    let text = std::fs::read_to_string(&header).expect("generated header");
    for name in ["opsplit_optimal", "opsplit_classify", "opsplit_experiment_free", "OpsplitExperiment"] {
        assert!(text.contains(name), "{name} missing from header");
    }
    for (compiler, lang) in [("cc", "c"), ("c++", "c++")] {
        let out = Command::new(compiler)
            .args(["-fsyntax-only", "-Wall", "-Werror", "-x", lang])
            .arg(&header)
            .output();
        match out {
            Ok(o) => assert!(o.status.success(), "{compiler}: {}", String::from_utf8_lossy(&o.stderr)),
            Err(_) => eprintln!("{compiler} not found; skipping syntax check"),
        }
    }
}
