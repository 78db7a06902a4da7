use std::ffi::CStr;
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use qeci_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    let n = unsafe { qeci_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 0);
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

#[test]
fn worked_example_through_the_c_abi() {
    let mut rho = ptr::null_mut();
    assert_eq!(unsafe { qeci_channel_qsc(0.4, 0.05, &mut rho) }, QeciStatus::Ok);
    let mut v = std::mem::MaybeUninit::<QeciVerdict>::uninit();
    assert_eq!(unsafe { qeci_infer(rho, 1e-9, v.as_mut_ptr()) }, QeciStatus::Ok);
    let v = unsafe { v.assume_init() };
    assert_eq!(v.direction, QeciDirection::AToB);
    assert!((v.s_forward - 1.2573).abs() < 5e-4);
    assert!((v.s_backward - 1.4270).abs() < 5e-4);
    assert!((v.s_exo_fwd - 0.2864).abs() < 5e-5);

    let mut dim = 0usize;
    assert_eq!(unsafe { qeci_density_dim(rho, &mut dim) }, QeciStatus::Ok);
    assert_eq!(dim, 4);
    let mut re = [0.0; 16];
    let mut im = [1.0; 16];
    assert_eq!(unsafe { qeci_density_copy_matrix(rho, re.as_mut_ptr(), im.as_mut_ptr(), 16) }, QeciStatus::Ok);
    assert!((re[0] - 0.38).abs() < 1e-12 && (re[15] - 0.57).abs() < 1e-12);
    assert!(im.iter().all(|&x| x == 0.0));
    assert_eq!(
        unsafe { qeci_density_copy_matrix(rho, re.as_mut_ptr(), ptr::null_mut(), 15) },
        QeciStatus::BufferTooSmall
    );
    unsafe { qeci_density_free(rho) };
}

#[test]
fn density_from_buffers() {
    let re = [0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5];
    let mut im = [0.0; 16];
    im[3] = 0.25;
    im[12] = -0.25;
    let mut rho = ptr::null_mut();
    assert_eq!(unsafe { qeci_density_new(re.as_ptr(), im.as_ptr(), 2, 2, 1e-9, &mut rho) }, QeciStatus::Ok);
    let mut s = 0.0;
    assert_eq!(unsafe { qeci_density_entropy(rho, &mut s) }, QeciStatus::Ok);
    // Eigenvalues 0.75 and 0.25.
    let expected = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
    assert!((s - expected).abs() < 1e-12);
    unsafe { qeci_density_free(rho) };
}

#[test]
fn errors_map_to_status_codes() {
    let mut rho = ptr::null_mut();
    let bad = [0.5, 0.0, 0.0, 0.4];
    assert_eq!(unsafe { qeci_density_new(bad.as_ptr(), ptr::null(), 2, 1, 1e-9, &mut rho) }, QeciStatus::TraceNotOne);
    assert!(last_error().starts_with("TraceNotOne"));
    assert!(rho.is_null());

    let neg = [1.1, 0.0, 0.0, -0.1];
    assert_eq!(unsafe { qeci_density_new(neg.as_ptr(), ptr::null(), 1, 2, 1e-9, &mut rho) }, QeciStatus::NotPsd);
    assert_eq!(unsafe { qeci_density_new(ptr::null(), ptr::null(), 1, 2, 1e-9, &mut rho) }, QeciStatus::NullPointer);
    assert_eq!(unsafe { qeci_density_new(neg.as_ptr(), ptr::null(), 0, 2, 1e-9, &mut rho) }, QeciStatus::DimensionMismatch);
    assert_eq!(unsafe { qeci_channel_gqsc(1.5, 0.1, &mut rho) }, QeciStatus::OutOfRange);
    assert_eq!(unsafe { qeci_channel_depolarizing(0.4, 0.6, 0.6, 0.6, 0.8, 0.1, &mut rho) }, QeciStatus::NotNormalized);
    assert_eq!(unsafe { qeci_channel_bitflip(0.1, ptr::null_mut()) }, QeciStatus::NullPointer);
    assert_eq!(unsafe { qeci_infer(ptr::null(), 1e-9, ptr::null_mut()) }, QeciStatus::NullPointer);
    unsafe { qeci_density_free(ptr::null_mut()) };
}

#[test]
fn channels_and_coupling() {
    let mut rho = ptr::null_mut();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert_eq!(unsafe { qeci_channel_depolarizing(0.4, 0.6, 0.8, h, h, 0.3, &mut rho) }, QeciStatus::Ok);
    let mut v = std::mem::MaybeUninit::<QeciVerdict>::uninit();
    assert_eq!(unsafe { qeci_infer(rho, 1e-9, v.as_mut_ptr()) }, QeciStatus::Ok);
    assert_eq!(unsafe { v.assume_init() }.direction, QeciDirection::AToB);
    unsafe { qeci_density_free(rho) };

    let rows = [0.05, 0.95, 0.05, 0.95];
    let mut bits = 0.0;
    assert_eq!(unsafe { qeci_coupling_entropy(rows.as_ptr(), 2, 2, &mut bits) }, QeciStatus::Ok);
    assert!((bits - 0.2864).abs() < 5e-5);
    let rows = [0.5, 0.4, 0.5, 0.5];
    assert_eq!(unsafe { qeci_coupling_entropy(rows.as_ptr(), 2, 2, &mut bits) }, QeciStatus::InvalidMarginals);
}

#[test]
fn last_error_truncates_and_reports_length() {
    let mut rho = ptr::null_mut();
    assert_eq!(unsafe { qeci_channel_qsc(-1.0, 0.1, &mut rho) }, QeciStatus::OutOfRange);
    let mut buf = [0x7f as std::ffi::c_char; 4];
    let n = unsafe { qeci_last_error(buf.as_mut_ptr(), buf.len()) };
    assert!(n > 3);
    assert_eq!(buf[3], 0);
    assert_eq!(unsafe { CStr::from_ptr(buf.as_ptr()) }.to_bytes(), b"Out");
    assert_eq!(unsafe { qeci_last_error(ptr::null_mut(), 0) }, n);
}

fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_entry_point() {
    let header = std::fs::read_to_string(manifest_dir().join("include/qeci.h")).unwrap();
    for name in [
        "qeci_density_new", "qeci_density_free", "qeci_density_dim", "qeci_density_entropy",
        "qeci_density_copy_matrix", "qeci_channel_qsc", "qeci_channel_gqsc",
        "qeci_channel_depolarizing", "qeci_channel_bitflip", "qeci_infer",
        "qeci_coupling_entropy", "qeci_last_error", "typedef struct QeciDensity QeciDensity",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

fn static_lib() -> Option<PathBuf> {
    // tests run from target/<profile>/deps
    let exe = std::env::current_exe().ok()?;
    let profile_dir = exe.parent()?.parent()?;
    let lib = profile_dir.join("libqeci_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_against_the_static_library() {
    let Some(lib) = static_lib() else {
        panic!("static library not found next to the test binary");
    };
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; skipping");
        return;
    }
    let out_dir = tempfile_dir();
    let exe = out_dir.join("smoke");
    let status = Command::new("cc")
        .arg(manifest_dir().join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .unwrap();
    assert!(status.success());
    let run = Command::new(&exe).output().unwrap();
    assert!(run.status.success(), "smoke exited with {:?}", run.status.code());
    assert_eq!(String::from_utf8_lossy(&run.stdout), "A->B 1.2573 1.4270\n");
    let _ = std::fs::remove_dir_all(&out_dir);
}

fn tempfile_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qeci-ffi-smoke-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

