//! CSV tables for a [`RunRecord`].
//!
//! `metrics.csv` has one row per sweep point, evaluated at `z_max`. Pulse and
//! force tables are written per stored slice as `pulse_z{label}.csv` and
//! `forces_z{label}.csv`, where the label is the depth in Beer lengths (or
//! metres with an `m` suffix). Sweeps add a `_p{index}` suffix.

use std::path::{Path, PathBuf};

use super::{OutputKind, PointRecord, RunRecord};
use crate::diagnostics;
use crate::error::Result;

pub const METRICS_HEADER: [&str; 14] = [
    "sweep_axis",
    "sweep_value",
    "sweep_unit",
    "z (m)",
    "delay (s)",
    "v_g (m/s)",
    "transmission_energy",
    "transmission_peak",
    "fitted_width (s)",
    "transparency_window (rad/s)",
    "eit_length (m)",
    "adiabaticity",
    "adiabaton_depth",
    "max_trace_drift",
];

pub const PULSE_HEADER: [&str; 5] = [
    "tau (s)",
    "re_omega_p (rad/s)",
    "im_omega_p (rad/s)",
    "abs_omega_p (rad/s)",
    "abs_omega_c (rad/s)",
];

pub const FORCES_HEADER: [&str; 3] = ["tau (s)", "f_rp (N)", "f_dip (N)"];

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn table_path(dir: &Path, stem: &str, label: &str, point: &PointRecord, sweep: bool) -> PathBuf {
    if sweep {
        dir.join(format!("{stem}_z{label}_p{}.csv", point.index))
    } else {
        dir.join(format!("{stem}_z{label}.csv"))
    }
}

fn write_metrics(record: &RunRecord, dir: &Path) -> Result<PathBuf> {
    let path = dir.join("metrics.csv");
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(METRICS_HEADER)?;
    let (axis, unit) = record
        .scenario
        .sweep
        .as_ref()
        .map_or(("none", ""), |s| (s.axis.name(), s.axis.unit()));
    for p in &record.points {
        let m = &p.exit;
        w.write_record([
            axis.to_string(),
            p.sweep_value.map_or(String::new(), num),
            unit.to_string(),
            num(m.z),
            num(m.delay),
            num(m.group_velocity),
            num(m.transmission_energy),
            num(m.transmission_peak),
            num(m.fitted_width),
            p.transparency_window.map_or(String::new(), num),
            num(p.eit_length.meters()),
            num(p.adiabaticity),
            num(p.adiabaton_depth),
            num(p.result.stats.max_trace_drift),
        ])?;
    }
    w.flush()?;
    Ok(path)
}

/// Writes the requested tables into `dir` (created if needed) and returns
/// the paths written, `metrics.csv` first.
pub fn emit_csv(record: &RunRecord, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let mut written = vec![write_metrics(record, dir)?];
    let outputs = &record.scenario.outputs;
    let sweep = record.scenario.sweep.is_some();
    for point in &record.points {
        let result = &point.result;
        for (z, label) in result.setup.slices.iter().zip(&point.slice_labels) {
            let slice = result.slice_at(*z)?;
            if outputs.contains(&OutputKind::Pulse) {
                let path = table_path(dir, "pulse", label, point, sweep);
                let mut w = csv::Writer::from_path(&path)?;
                w.write_record(PULSE_HEADER)?;
                for ((t, p), c) in result
                    .tau
                    .iter()
                    .zip(&slice.fields.omega_p)
                    .zip(&slice.fields.omega_c)
                {
                    w.write_record([num(*t), num(p.re), num(p.im), num(p.norm()), num(c.norm())])?;
                }
                w.flush()?;
                written.push(path);
            }
            if outputs.contains(&OutputKind::Forces) {
                let trace = diagnostics::forces(result, *z, &result.setup.atoms)?;
                let path = table_path(dir, "forces", label, point, sweep);
                let mut w = csv::Writer::from_path(&path)?;
                w.write_record(FORCES_HEADER)?;
                for ((t, rp), dip) in result.tau.iter().zip(&trace.f_rp).zip(&trace.f_dip) {
                    w.write_record([num(*t), num(*rp), num(*dip)])?;
                }
                w.flush()?;
                written.push(path);
            }
        }
    }
    Ok(written)
}
