//! End-to-end runs of scenarios through to CSV files.

use std::fs;
use std::path::{Path, PathBuf};

use slowlight::constants::SPEED_OF_LIGHT;
use slowlight::diagnostics::linear_fit;
use slowlight::scenarios::{self, emit_csv, parse_scenario, preset, run, Length, OutputKind, Scenario};
use slowlight::Error;

fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    fs::read_to_string(path).unwrap()
}

fn first_line(path: &Path) -> String {
    let text = fs::read_to_string(path).unwrap();
    format!("{}\n", text.lines().next().unwrap())
}

fn read_column(path: &Path, column: usize) -> Vec<f64> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    reader
        .records()
        .map(|r| r.unwrap()[column].parse().unwrap())
        .collect()
}

fn small(mut s: Scenario) -> Scenario {
    s.grid.n_z = 96;
    s.grid.n_tau = 1024;
    s.grid.z_max = Length::BeerLengths(10.0);
    s.slices = vec![Length::BeerLengths(0.0), Length::BeerLengths(10.0)];
    s
}

fn files_in(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<_> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    v.sort();
    v
}

#[test]
fn vacuum_point_is_transparent() {
    let text = "density = 0\nomega_c = 0.18A\nomega_p_peak = 0.1A\npulse_width = 80/A\nz_max = 1e-3\nslices = 0, 5e-4\n";
    let s = parse_scenario(text, Path::new("vacuum.cfg"), None).unwrap();
    let record = run(&s).unwrap();
    assert_eq!(record.points.len(), 1);
    let m = record.points[0].exit;
    assert_eq!(m.group_velocity, SPEED_OF_LIGHT);
    assert_eq!(m.delay, 0.0);
    assert_eq!(m.transmission_energy, 1.0);
    assert_eq!(m.transmission_peak, 1.0);

    let dir = tempfile::tempdir().unwrap();
    let written = emit_csv(&record, dir.path()).unwrap();
    let metrics = dir.path().join("metrics.csv");
    assert_eq!(written[0], metrics);
    assert_eq!(fs::read_to_string(&metrics).unwrap().lines().count(), 2);
    assert!(dir.path().join("pulse_z0.0005m.csv").exists());
}

#[test]
fn headers_match_golden_files() {
    let mut s = small(preset("fig6").unwrap());
    s.outputs = vec![OutputKind::Pulse, OutputKind::Forces];
    let record = run(&s).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_csv(&record, dir.path()).unwrap();
    assert_eq!(first_line(&dir.path().join("metrics.csv")), golden("metrics_header.csv"));
    assert_eq!(first_line(&dir.path().join("pulse_z10.csv")), golden("pulse_header.csv"));
    assert_eq!(first_line(&dir.path().join("forces_z0.csv")), golden("forces_header.csv"));
    assert_eq!(
        scenarios::METRICS_HEADER.join(",") + "\n",
        golden("metrics_header.csv")
    );
}

#[test]
fn reruns_are_byte_identical() {
    let mut s = small(preset("fig3b").unwrap());
    s.outputs = vec![OutputKind::Pulse, OutputKind::Forces];
    let one = tempfile::tempdir().unwrap();
    let two = tempfile::tempdir().unwrap();
    emit_csv(&run(&s).unwrap(), one.path()).unwrap();
    s.workers = Some(1);
    emit_csv(&run(&s).unwrap(), two.path()).unwrap();
    let (a, b) = (files_in(one.path()), files_in(two.path()));
    assert_eq!(a.len(), 1 + 2 * 2 * 5);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.file_name(), y.file_name());
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap(), "{}", x.display());
    }
}

#[test]
fn fig2_exit_pulse_is_delayed_and_attenuated() {
    let s = preset("fig2").unwrap();
    let record = run(&s).unwrap();
    let dir = tempfile::tempdir().unwrap();
    emit_csv(&record, dir.path()).unwrap();
    let input = dir.path().join("pulse_z0.csv");
    let exit = dir.path().join("pulse_z63.csv");
    let tau = read_column(&input, 0);
    let peak = |p: &Path| read_column(p, 3).into_iter().fold(0.0f64, f64::max);
    assert!(peak(&exit) < peak(&input));
    let centroid = |p: &Path| {
        let w: Vec<f64> = read_column(p, 3).iter().map(|x| x * x).collect();
        w.iter().zip(&tau).map(|(w, t)| w * t).sum::<f64>() / w.iter().sum::<f64>()
    };
    assert!(centroid(&exit) > centroid(&input) + 10.0 * s.lasers.pulse_width);
    assert!(record.max_trace_drift() <= 1e-6);
}

#[test]
fn fig3b_velocity_is_linear_in_inverse_density() {
    let record = run(&preset("fig3b").unwrap()).unwrap();
    let inv_n: Vec<f64> = record.points.iter().map(|p| 1.0 / p.sweep_value.unwrap()).collect();
    let v: Vec<f64> = record.points.iter().map(|p| p.exit.group_velocity).collect();
    let mut order: Vec<usize> = (0..v.len()).collect();
    order.sort_by(|&i, &j| inv_n[i].total_cmp(&inv_n[j]));
    assert!(order.windows(2).all(|w| v[w[1]] > v[w[0]]), "{v:?}");
    assert!(linear_fit(&inv_n, &v).unwrap().r_squared >= 0.999);
}

#[test]
fn fig4_transmission_grows_with_pulse_width() {
    let mut s = preset("fig4").unwrap();
    s.slices = vec![Length::BeerLengths(63.0)];
    let record = run(&s).unwrap();
    let peaks: Vec<f64> = record.points.iter().map(|p| p.exit.transmission_peak).collect();
    assert!(peaks[0] < peaks[1] && peaks[1] < peaks[2], "{peaks:?}");
}

#[test]
fn solver_errors_name_the_sweep_point() {
    let mut s = small(preset("fig3b").unwrap());
    s.lasers.omega_p_peak = 0.0;
    match run(&s).unwrap_err() {
        Error::SweepPoint { index, axis, source, .. } => {
            assert_eq!(index, 0);
            assert_eq!(axis, "density");
            assert!(matches!(*source, Error::ZeroProbeEnergy { .. }));
            assert!(!source.is_validation());
        }
        other => panic!("unexpected {other:?}"),
    }
    s.workers = Some(0);
    assert!(run(&s).unwrap_err().is_validation());
}
