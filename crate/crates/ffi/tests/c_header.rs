//! Compiles a C program against the generated header and the static library.

use std::path::{Path, PathBuf};
use std::process::Command;

fn header_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(header_dir().join("hybrid_cv.h")).unwrap();
    for name in [
        "hcv_last_error",
        "hcv_state_vacuum",
        "hcv_state_free",
        "hcv_state_build_cylindrical",
        "hcv_duan_linearized",
        "hcv_schmidt",
        "HCV_STATUS_CRITERION_DEGENERATE",
        "typedef struct HcvGaussianState HcvGaussianState;",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}

#[test]
fn c_program_links_and_runs() {
    // target/<profile>/deps/<test binary>
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libhybrid_cv_ffi.a");
    if !lib.exists() {
        eprintln!("skipping: {} not built", lib.display());
        return;
    }
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let out_dir = tempfile::tempdir().unwrap();
    let bin = out_dir.path().join("smoke");
    let compiled = Command::new(&cc)
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(header_dir())
        .arg(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm"])
        .arg("-o")
        .arg(&bin)
        .output();
    let compiled = match compiled {
        Ok(o) => o,
        Err(e) => {
            eprintln!("skipping: no C compiler ({e})");
            return;
        }
    };
    assert!(
        compiled.status.success(),
        "{}",
        String::from_utf8_lossy(&compiled.stderr)
    );
    let run = Command::new(&bin).output().unwrap();
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stdout).starts_with("lhs 0.683939720"));
}
