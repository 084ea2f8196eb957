//! Compiles `c_header.c` against the generated header and the static
//! library, then runs it.

use std::path::{Path, PathBuf};
use std::process::Command;

/// `cargo test` leaves the static library next to the test binary in
/// `deps/`; `cargo build` also copies it one level up.
fn static_lib() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    let deps = exe.parent().unwrap();
    [deps, deps.parent().unwrap()]
        .iter()
        .map(|d| d.join("libacka_ffi.a"))
        .find(|p| p.exists())
        .expect("libacka_ffi.a built alongside the tests")
}

#[test]
fn header_compiles_and_links() {
    let crate_dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = crate_dir.join("include/acka.h");
    let text = std::fs::read_to_string(&header).unwrap();
    for sym in [
        "acka_config_new",
        "acka_run",
        "acka_run_free",
        "acka_security_report",
        "acka_last_error",
    ] {
        assert!(text.contains(&format!("{sym}(")), "{sym} missing from header");
    }

    let lib = static_lib();
    let tmp = tempfile_dir();
    let exe = tmp.join("c_header");
    let status = Command::new("cc")
        .arg("-std=c99")
        .arg("-Wall")
        .arg("-Werror")
        .arg("-I")
        .arg(crate_dir.join("include"))
        .arg(crate_dir.join("tests/c_header.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler available");
    assert!(status.success(), "C build failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("ok "));
}

fn tempfile_dir() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("c_header");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}
