use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use betcraft_ffi::*;

fn new_test(spec: &str) -> *mut BetcraftTest {
    let spec = CString::new(spec).unwrap();
    let mut t = ptr::null_mut();
    let status = unsafe { betcraft_test_new(spec.as_ptr(), 0.05, &mut t) };
    assert_eq!(status, BetcraftStatus::Ok);
    assert!(!t.is_null());
    t
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(betcraft_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn scalar_test_lifecycle() {
    let t = new_test(r#"{"test":"ks1","target":{"uniform":{"a":0,"b":1}}}"#);
    let mut rejected = true;
    // xorshift64 draws, uniform on [0, 1).
    let mut state = 0x2545_F491_4F6C_DD1Du64;
    for _ in 0..50 {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        let x = (state >> 11) as f64 / (1u64 << 53) as f64;
        let s = unsafe { betcraft_test_observe_scalar(t, x, &mut rejected) };
        assert_eq!(s, BetcraftStatus::Ok);
    }
    assert!(!rejected);
    let (mut steps, mut tau, mut w) = (0u64, 9u64, 0.0);
    unsafe {
        assert_eq!(betcraft_test_steps(t, &mut steps), BetcraftStatus::Ok);
        assert_eq!(betcraft_test_stopping_time(t, &mut tau), BetcraftStatus::Ok);
        assert_eq!(betcraft_test_statistic(t, &mut w), BetcraftStatus::Ok);
        betcraft_test_free(t);
    }
    assert_eq!(steps, 50);
    assert_eq!(tau, 0);
    assert!(w > 0.0 && w < 20.0);
}

#[test]
fn two_sample_vectors_reject_separated_clouds() {
    let t = new_test(r#"{"test":"mmd","bandwidth":1.0}"#);
    let mut rejected = false;
    let mut n = 0;
    while !rejected && n < 500 {
        let a = (n as f64 * 0.754_877_666).fract();
        let x = [a, 0.0];
        let y = [a + 4.0, 4.0];
        let s = unsafe { betcraft_test_observe_vectors(t, x.as_ptr(), y.as_ptr(), 2, &mut rejected) };
        assert_eq!(s, BetcraftStatus::Ok);
        n += 1;
    }
    assert!(rejected, "no rejection after {n} steps");
    unsafe { betcraft_test_free(t) };
}

#[test]
fn errors_are_reported_not_raised() {
    let mut t = ptr::null_mut();
    let bad = CString::new(r#"{"test":"ks1"}"#).unwrap();
    assert_eq!(
        unsafe { betcraft_test_new(bad.as_ptr(), 0.05, &mut t) },
        BetcraftStatus::InvalidArgument
    );
    assert!(t.is_null());
    assert!(last_error().contains("target"), "{}", last_error());

    assert_eq!(
        unsafe { betcraft_test_new(ptr::null(), 0.05, &mut t) },
        BetcraftStatus::NullPointer
    );

    let t = new_test(r#"{"test":"dominance"}"#);
    let mut r = false;
    assert_eq!(
        unsafe { betcraft_test_observe_pair(t, 2.0, 0.5, &mut r) },
        BetcraftStatus::WrongObservation
    );
    assert_eq!(
        unsafe { betcraft_test_observe_scalar(t, 0.5, &mut r) },
        BetcraftStatus::WrongObservation
    );
    unsafe {
        betcraft_test_free(t);
        betcraft_test_free(ptr::null_mut());
    }
    let mut steps = 0;
    assert_eq!(
        unsafe { betcraft_test_steps(ptr::null(), &mut steps) },
        BetcraftStatus::NullPointer
    );
}

#[test]
fn quantiles_and_messages() {
    let mut q = 0.0;
    assert_eq!(
        unsafe { betcraft_kolmogorov_quantile(0.05, &mut q) },
        BetcraftStatus::Ok
    );
    assert!((q - 1.358_098_6).abs() < 1e-6, "{q}");
    assert_eq!(
        unsafe { betcraft_chi2_quantile(3, 1.5, &mut q) },
        BetcraftStatus::InvalidArgument
    );
    let msg = unsafe { CStr::from_ptr(betcraft_status_message(BetcraftStatus::NullPointer)) };
    assert_eq!(msg.to_str().unwrap(), "null pointer argument");
}

#[test]
fn header_is_current() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/betcraft.h")).unwrap();
    for name in [
        "typedef struct BetcraftTest BetcraftTest;",
        "betcraft_test_new(",
        "betcraft_test_observe_vectors(",
        "betcraft_test_stopping_time(",
        "BETCRAFT_STATUS_WRONG_OBSERVATION = 3",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

/// Compile and run a C program against the generated header and the static
/// library built alongside this test.
#[test]
fn c_program_links_and_runs() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let tmp = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let profile_dir = tmp.parent().unwrap().join(if cfg!(debug_assertions) {
        "debug"
    } else {
        "release"
    });
    let lib = profile_dir.join("libbetcraft_ffi.a");
    if !lib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library at {}", lib.display());
        return;
    }
    let exe = tmp.join("betcraft_smoke");
    let status = Command::new("cc")
        .arg(dir.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success(), "C compile failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "smoke program exited with {:?}",
        out.status.code()
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}
