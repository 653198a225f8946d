//! The generated header declares every exported symbol and compiles as C.

use std::path::{Path, PathBuf};
use std::process::Command;

const EXPORTS: &[&str] = &[
    "qic_version",
    "qic_last_error",
    "qic_gaussian_vacuum",
    "qic_gaussian_new",
    "qic_gaussian_free",
    "qic_gaussian_n_modes",
    "qic_gaussian_purity_residual",
    "qic_gaussian_conjugate",
    "qic_gaussian_mode_entropy",
    "qic_entropy_from_g",
    "qic_lattice_new",
    "qic_lattice_free",
    "qic_lattice_dispersion",
    "qic_lattice_vacuum",
    "qic_lattice_evolve",
    "qic_swap_identity_residual",
    "qic_construct_qic_purity",
    "qic_fisher_information",
];

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include").join("qic.h")
}

#[test]
fn header_declares_exports() {
    let text = std::fs::read_to_string(header()).unwrap();
    for name in EXPORTS {
        let found = text.match_indices(&format!("{name}(")).any(|(i, _)| {
            i > 0 && matches!(text.as_bytes()[i - 1], b' ' | b'*')
        });
        assert!(found, "{name} missing from qic.h");
    }
    assert!(text.contains("typedef struct QicGaussianState QicGaussianState;"));
    assert!(text.contains("QIC_STATUS_INVARIANT_VIOLATION = 3"));
    assert!(text.contains("size_t"));
}

/// Directory holding `libqic_ffi.a`: two levels above the test executable.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_static_library() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler ({cc}) available, skipping link check");
        return;
    }
    let lib = artifact_dir().join("libqic_ffi.a");
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = std::env::temp_dir().join(format!("qic_ffi_c_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let src = dir.join("main.c");
    std::fs::write(
        &src,
        r#"#include <math.h>
#include <stdio.h>
#include "qic.h"

int main(void) {
    QicGaussianState *vac = NULL;
    if (qic_gaussian_vacuum(1, &vac) != QIC_STATUS_OK) return 1;
    double v[2] = {1.0, 0.0}, u[2] = {0.0, 0.0};
    if (qic_gaussian_conjugate(vac, v, 2, u) != QIC_STATUS_OK) return 2;
    if (u[0] != 0.0 || u[1] != 1.0) return 3;
    qic_gaussian_free(vac);
    QicLattice *lat = NULL;
    if (qic_lattice_new(30, 0.4, &lat) != QIC_STATUS_OK) return 4;
    double w[30];
    if (qic_lattice_dispersion(lat, w, 30) != QIC_STATUS_OK) return 5;
    qic_lattice_free(lat);
    if (fabs(w[14] - sqrt(2.6)) > 1e-12) return 6;
    if (qic_gaussian_vacuum(1, NULL) != QIC_STATUS_NULL_POINTER) return 7;
    if (qic_last_error() == NULL) return 8;
    printf("%s\n", qic_version());
    return 0;
}
"#,
    )
    .unwrap();
    let bin = dir.join("qic_c_smoke");
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "C smoke program exited with {:?}", out.status);
    assert_eq!(
        String::from_utf8_lossy(&out.stdout).trim(),
        env!("CARGO_PKG_VERSION")
    );
    let _ = std::fs::remove_dir_all(&dir);
}
