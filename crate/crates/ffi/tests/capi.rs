use std::ffi::{c_char, CString};
use std::ptr;

use hr_sync_ffi::*;

fn last_error() -> String {
    let len = unsafe { hr_last_error_message(ptr::null_mut(), 0) };
    let mut buf = vec![0u8; len + 1];
    unsafe { hr_last_error_message(buf.as_mut_ptr().cast::<c_char>(), buf.len()) };
    String::from_utf8(buf[..len].to_vec()).unwrap()
}

fn new_sim(p: f64, points: usize) -> *mut HrSimulation {
    let params = hr_parameters_test_set(p);
    let mut sim = ptr::null_mut();
    let status = unsafe {
        hr_simulation_new(
            &params,
            1,
            points,
            1.0,
            1e-3,
            HrScheme::ImexStrang,
            &mut sim,
        )
    };
    assert_eq!(status, HrStatus::Ok);
    assert!(!sim.is_null());
    sim
}

#[test]
fn threshold_and_constants() {
    let params = hr_parameters_test_set(6.0);
    let mut p_star = 0.0;
    assert_eq!(
        unsafe { hr_sync_threshold(&params, &mut p_star) },
        HrStatus::Ok
    );
    assert_eq!(p_star, 5.0);

    let mut k = HrConstants {
        c1: 0.0,
        c2: 0.0,
        r1: 0.0,
        m: 0.0,
        k: 0.0,
        c3: 0.0,
        lambda: 0.0,
        p_star: 0.0,
        delta: 0.0,
        mu: 0.0,
    };
    assert_eq!(unsafe { hr_constants(&params, 1.0, &mut k) }, HrStatus::Ok);
    assert_eq!((k.c1, k.r1, k.lambda, k.mu), (5.0, 0.5, 8.0, 1.0));

    let below = hr_parameters_test_set(1.0);
    assert_eq!(unsafe { hr_constants(&below, 1.0, &mut k) }, HrStatus::Ok);
    assert!(k.mu.is_nan());
}

#[test]
fn null_pointers_are_reported() {
    let mut out = 0.0;
    assert_eq!(
        unsafe { hr_sync_threshold(ptr::null(), &mut out) },
        HrStatus::NullPointer
    );
    assert_eq!(last_error(), "params is null");
    assert_eq!(
        unsafe { hr_simulation_advance(ptr::null_mut(), 1) },
        HrStatus::NullPointer
    );
    assert_eq!(unsafe { hr_simulation_len(ptr::null()) }, 0);
    unsafe { hr_simulation_free(ptr::null_mut()) };
}

#[test]
fn invalid_arguments() {
    let mut params = hr_parameters_test_set(1.0);
    let mut sim = ptr::null_mut();
    let status =
        unsafe { hr_simulation_new(&params, 3, 11, 1.0, 1e-3, HrScheme::ImexEuler, &mut sim) };
    assert_eq!(status, HrStatus::InvalidArgument);
    assert!(last_error().contains("dimension"));
    assert!(sim.is_null());

    params.b = -1.0;
    let status =
        unsafe { hr_simulation_new(&params, 1, 11, 1.0, 1e-3, HrScheme::ImexEuler, &mut sim) };
    assert_eq!(status, HrStatus::InvalidArgument);
    assert!(last_error().contains("b must be positive"));
}

#[test]
fn state_round_trip_and_advance() {
    let sim = new_sim(6.0, 11);
    let n = unsafe { hr_simulation_len(sim) };
    assert_eq!(n, 11);

    let data: Vec<f64> = (0..6 * n).map(|i| (i as f64 * 0.37).sin()).collect();
    assert_eq!(
        unsafe { hr_simulation_set_state(sim, data.as_ptr(), data.len()) },
        HrStatus::Ok
    );
    let mut back = vec![0.0; 6 * n];
    assert_eq!(
        unsafe { hr_simulation_state(sim, back.as_mut_ptr(), back.len()) },
        HrStatus::Ok
    );
    assert_eq!(back, data);

    let mut small = vec![0.0; n];
    assert_eq!(
        unsafe { hr_simulation_state(sim, small.as_mut_ptr(), small.len()) },
        HrStatus::BufferTooSmall
    );
    assert_eq!(
        unsafe { hr_simulation_set_state(sim, data.as_ptr(), 5) },
        HrStatus::InvalidArgument
    );

    let mut before = HrRecord {
        t: 0.0,
        norm_g_sq: 0.0,
        sync_l: 0.0,
        sync_dist_sq: 0.0,
        h1_u: 0.0,
        weighted_norm: 0.0,
    };
    let mut after = before;
    assert_eq!(
        unsafe { hr_simulation_diagnostics(sim, &mut before) },
        HrStatus::Ok
    );
    assert_eq!(unsafe { hr_simulation_advance(sim, 2000) }, HrStatus::Ok);
    assert_eq!(
        unsafe { hr_simulation_diagnostics(sim, &mut after) },
        HrStatus::Ok
    );
    assert!((unsafe { hr_simulation_time(sim) } - 2.0).abs() < 1e-12);
    assert_eq!(after.t, unsafe { hr_simulation_time(sim) });
    assert!(after.sync_dist_sq < before.sync_dist_sq * (-1.0f64).exp());
    unsafe { hr_simulation_free(sim) };
}

#[test]
fn matches_the_rust_api() {
    let text = CString::new(
        "[parameters]\npreset = \"test\"\np = 6\n[grid]\npoints = 21\n[initial]\nseed = 4\n",
    )
    .unwrap();
    let mut sim = ptr::null_mut();
    assert_eq!(
        unsafe { hr_simulation_from_config(text.as_ptr(), &mut sim) },
        HrStatus::Ok
    );
    assert_eq!(unsafe { hr_simulation_advance(sim, 500) }, HrStatus::Ok);
    let mut rec = HrRecord {
        t: 0.0,
        norm_g_sq: 0.0,
        sync_l: 0.0,
        sync_dist_sq: 0.0,
        h1_u: 0.0,
        weighted_norm: 0.0,
    };
    assert_eq!(
        unsafe { hr_simulation_diagnostics(sim, &mut rec) },
        HrStatus::Ok
    );
    unsafe { hr_simulation_free(sim) };

    let cfg = hr_sync::parse_run_config(text.to_str().unwrap()).unwrap();
    let grid = cfg.grid.build().unwrap();
    let rust = hr_sync::Simulation::new(grid, cfg.params, cfg.stepper).unwrap();
    let s0 = hr_sync::generate_initial_condition(&cfg.initial, &grid).unwrap();
    let traj = rust.integrate(&s0, 0.5, 500).unwrap();
    let last = traj.records.last().unwrap();
    assert_eq!(rec.sync_l, last.sync_l);
    assert_eq!(rec.norm_g_sq, last.norm_g_sq);
}

#[test]
fn config_errors_and_fourier_init() {
    let text = CString::new("[grid]\npoints = 2\n").unwrap();
    let mut sim = ptr::null_mut();
    assert_eq!(
        unsafe { hr_simulation_from_config(text.as_ptr(), &mut sim) },
        HrStatus::InvalidConfig
    );
    assert!(last_error().starts_with("line 2"));

    let sim = new_sim(0.0, 11);
    assert_eq!(
        unsafe { hr_simulation_init_fourier(sim, 3, 1.0) },
        HrStatus::Ok
    );
    let mut rec = HrRecord {
        t: 1.0,
        norm_g_sq: 0.0,
        sync_l: 0.0,
        sync_dist_sq: 0.0,
        h1_u: 0.0,
        weighted_norm: 0.0,
    };
    assert_eq!(
        unsafe { hr_simulation_diagnostics(sim, &mut rec) },
        HrStatus::Ok
    );
    assert_eq!(rec.t, 0.0);
    assert!(rec.norm_g_sq > 0.0);
    unsafe { hr_simulation_free(sim) };
}

#[test]
fn non_finite_state_is_rejected_and_kept() {
    let params = hr_parameters_test_set(0.0);
    let mut sim = ptr::null_mut();
    let status =
        unsafe { hr_simulation_new(&params, 1, 11, 1.0, 0.5, HrScheme::ImexEuler, &mut sim) };
    assert_eq!(status, HrStatus::Ok);
    let data = vec![40.0; 66];
    assert_eq!(
        unsafe { hr_simulation_set_state(sim, data.as_ptr(), data.len()) },
        HrStatus::Ok
    );
    assert_eq!(
        unsafe { hr_simulation_advance(sim, 50) },
        HrStatus::NonFinite
    );
    assert!(last_error().contains("non-finite"));
    let mut back = vec![0.0; 66];
    unsafe { hr_simulation_state(sim, back.as_mut_ptr(), back.len()) };
    assert_eq!(back, data);
    assert_eq!(unsafe { hr_simulation_time(sim) }, 0.0);
    unsafe { hr_simulation_free(sim) };
}

#[test]
fn header_declares_every_export() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hr_sync.h")).unwrap();
    for name in [
        "hr_parameters_test_set",
        "hr_sync_threshold",
        "hr_constants",
        "hr_simulation_new",
        "hr_simulation_from_config",
        "hr_simulation_free",
        "hr_simulation_len",
        "hr_simulation_time",
        "hr_simulation_set_state",
        "hr_simulation_init_fourier",
        "hr_simulation_advance",
        "hr_simulation_diagnostics",
        "hr_simulation_constants",
        "hr_simulation_state",
        "hr_last_error_message",
        "typedef struct HrSimulation HrSimulation;",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}

#[test]
fn c_program_links_against_the_static_library() {
    let Some(cc) = ["cc", "gcc", "clang"].into_iter().find(|c| {
        std::process::Command::new(c)
            .arg("--version")
            .output()
            .is_ok()
    }) else {
        eprintln!("no C compiler found; skipping");
        return;
    };
    let manifest = std::path::Path::new(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libhr_sync_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let exe = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("hr_sync_smoke");
    let status = std::process::Command::new(cc)
        .arg(manifest.join("examples/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let out = std::process::Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    assert!(String::from_utf8_lossy(&out.stdout).contains("expected error: out is null"));
}
