use std::path::{Path, PathBuf};
use std::process::Command;

const FUNCTIONS: [&str; 15] = [
    "hcs_state_new",
    "hcs_state_free",
    "hcs_state_amplitude",
    "hcs_state_w",
    "hcs_state_ww",
    "hcs_state_expect_position",
    "hcs_state_expect_r",
    "hcs_state_evolve",
    "hcs_overlap",
    "hcs_laguerre",
    "hcs_eigenstate",
    "hcs_commutator_max_residual",
    "hcs_status_message",
    "hcs_last_error",
    "typedef struct HcsState HcsState",
];

const PROGRAM: &str = r#"
#include <math.h>
#include <stdio.h>
#include <string.h>
#include "hcs.h"

int main(void) {
    double re[3] = {0.0, 0.5, 0.0};
    double im[3] = {0.0, 0.0, 0.0};
    HcsState *s = NULL;
    if (hcs_state_new(re, im, &s) != HCS_STATUS_OK) return 10;
    HcsComplex a;
    if (hcs_state_amplitude(s, 0.0, 0.0, 0.0, &a) != HCS_STATUS_OK) return 11;
    if (fabs(a.re - 0.6 / sqrt(M_PI)) > 1e-15) return 12;
    double bad[3] = {0.0, 0.0, 0.0};
    double big[3] = {2.0, 0.0, 0.0};
    HcsState *t = NULL;
    if (hcs_state_new(bad, big, &t) != HCS_STATUS_INADMISSIBLE) return 13;
    if (strlen(hcs_last_error()) == 0) return 14;
    hcs_state_free(s);
    printf("ok\n");
    return 0;
}
"#;

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include")
}

#[test]
fn header_declares_the_api() {
    let text = std::fs::read_to_string(header().join("hcs.h")).unwrap();
    for f in FUNCTIONS {
        assert!(text.contains(f), "{f}");
    }
    assert!(text.contains("HCS_STATUS_PANIC = 7"));
}

#[test]
fn c_program_links_against_static_library() {
    // target/<profile>/deps/<this test> -> target/<profile>/libhcs_ffi.a
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libhcs_ffi.a");
    if !lib.exists() {
        panic!("static library not found at {}", lib.display());
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    let bin = dir.path().join("main");
    std::fs::write(&src, PROGRAM).unwrap();
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let status = Command::new(&cc)
        .arg("-D_DEFAULT_SOURCE")
        .arg(&src)
        .arg("-I")
        .arg(header())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap_or_else(|e| panic!("cannot run {cc}: {e}"));
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "ok\n");
}
