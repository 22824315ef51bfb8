use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn slowlight(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slowlight"))
        .args(args)
        .output()
        .expect("binary runs")
}

const SHORT: &str = "\
density = 3.3e12 cm^-3
omega_c = 0.18A
omega_p_peak = 0.1A
pulse_width = 80/A
z_max = 5zeta_p
n_z = 32
n_tau = 512
slices = 0zeta_p, 5zeta_p
outputs = pulse, forces
";

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn presets_lists_builtins() {
    let out = slowlight(&["presets"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["fig2", "fig3a", "fig3b", "fig4", "fig5", "fig6"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
}

#[test]
fn run_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "short.cfg", SHORT);
    let out_dir = dir.path().join("out");
    let out = slowlight(&["run", &cfg, "--out", out_dir.to_str().unwrap(), "--workers", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    for file in ["metrics.csv", "pulse_z0.csv", "pulse_z5.csv", "forces_z0.csv", "forces_z5.csv"] {
        assert!(out_dir.join(file).exists(), "{file}");
    }
}

#[test]
fn preset_with_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "o.cfg", "z_max = 4zeta_p\nn_z = 32\nn_tau = 512\nslices = 4zeta_p\n");
    let out_dir = dir.path().join("out");
    let out = slowlight(&["run", &cfg, "--preset", "fig5", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(out_dir.join("pulse_z4.csv").exists());
}

#[test]
fn validation_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let missing = write(dir.path(), "m.cfg", &SHORT.replace("density = 3.3e12 cm^-3\n", ""));
    let out = slowlight(&["run", &missing]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("density"));

    let unknown = write(dir.path(), "u.cfg", &format!("{SHORT}colour = red\n"));
    let out = slowlight(&["run", &unknown]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":10:"));

    let out = slowlight(&["run", &unknown, "--preset", "fig9"]);
    assert_eq!(out.status.code(), Some(2));
    let out = slowlight(&["run", dir.path().join("absent.cfg").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solver_failures_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let dark = write(dir.path(), "d.cfg", &SHORT.replace("omega_p_peak = 0.1A", "omega_p_peak = 0"));
    let out = slowlight(&["run", &dark, "--out", dir.path().join("out").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}
