//! Built-in scenarios for the sodium slow-light experiments.

use super::{GridSpec, Length, OutputKind, Scenario, Sweep, SweepAxis};
use crate::atomsys::{AtomParams, LaserParams, SystemVariant};

/// Where a preset number comes from. `value` is in the unit the source
/// states it in (`A`, `1/A`, `cm^-3`, `zeta_p`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresetSource {
    pub preset: &'static str,
    pub key: &'static str,
    pub value: f64,
    pub source: &'static str,
}

const fn src(preset: &'static str, key: &'static str, value: f64, source: &'static str) -> PresetSource {
    PresetSource {
        preset,
        key,
        value,
        source,
    }
}

const FIG3_DENSITIES: [f64; 5] = [0.5, 1.0, 2.0, 3.3, 5.0];

/// Provenance of every number in [`preset`].
pub const PRESET_SOURCES: &[PresetSource] = &[
    src("*", "A", 2.0 * std::f64::consts::PI * 5.9e6, "Na D2 line parameters (A = 2π·5.9 MHz, λ = 589.0 nm)"),
    src("*", "lambda", 589.0e-9, "Na D2 line parameters (A = 2π·5.9 MHz, λ = 589.0 nm)"),
    src("*", "gamma_c", 1.0 / 3.0, "Γ_c = A/3, Γ_p = A/2, Γ_out = A/6"),
    src("*", "gamma_p", 1.0 / 2.0, "Γ_c = A/3, Γ_p = A/2, Γ_out = A/6"),
    src("*", "gamma_out", 1.0 / 6.0, "Γ_c = A/3, Γ_p = A/2, Γ_out = A/6"),
    src("*", "gamma_cp", 0.0, "ideal case of zero ground state decoherence"),
    src("*", "density", 3.3, "cold atom density of 3.3·10^12 atoms/cm^3"),
    src("*", "z_max", 63.0, "up to a distance z equal to 63 times the Beer's length"),
    src("*", "omega_c", 0.18, "coupling intensity of 3 mW/cm^2 corresponding to Ω_c = 0.18 A"),
    src("*", "omega_p_peak", 0.1, "assumed: initial Rabi frequencies Ω_op and Ω_c around a tenth of A"),
    src("*", "pulse_width", 80.0, "Initial Gaussian probe pulse width T = 80/A"),
    src("*", "slices", 30.0, "pulses for propagation through the medium at z = 30 ζ_p and at z = 63 ζ_p"),
    src("fig3a", "omega_c", 0.56, "coupling intensity of 12 mW/cm^2 corresponding to Ω_c = 0.56 A"),
    src("fig3a", "sweep_values", 0.5, "density swept over [0.5, 5]·10^12 cm^-3 (range read off the velocity plot)"),
    src("fig3b", "sweep_values", 0.5, "density swept over [0.5, 5]·10^12 cm^-3 (range read off the velocity plot)"),
    src("fig4", "pulse_width", 40.0, "Higher transmission pulses are obtained at T = 160/A decreasing at T = 80/A and T = 40/A"),
    src("fig4", "pulse_width", 160.0, "Higher transmission pulses are obtained at T = 160/A decreasing at T = 80/A and T = 40/A"),
    src("fig5", "delta", -1.0, "maintaining the Raman resonance condition δ_R = 0, i.e. δ_c = δ_p = −A"),
    src("fig6", "delta", -1.0, "forces at δ_c = δ_p = −A while the probe enters the medium (z = 0)"),
    src("fig6", "slices", 0.0, "forces at δ_c = δ_p = −A while the probe enters the medium (z = 0)"),
];

pub fn preset_names() -> &'static [&'static str] {
    &["fig2", "fig3a", "fig3b", "fig4", "fig5", "fig6"]
}

fn base(label: &str) -> Scenario {
    let atoms = AtomParams::sodium_d2();
    let a = atoms.total_decay;
    Scenario {
        atoms,
        lasers: LaserParams {
            omega_c: 0.18 * a,
            omega_p_peak: 0.1 * a,
            pulse_width: 80.0 / a,
            delta_c: 0.0,
            delta_p: 0.0,
            density: 3.3e18,
        },
        grid: GridSpec {
            n_tau: 2048,
            n_z: 256,
            z_max: Length::BeerLengths(63.0),
        },
        variant: SystemVariant::Open,
        momentum_mode: false,
        sweep: None,
        outputs: vec![OutputKind::Pulse],
        slices: Vec::new(),
        label: label.to_string(),
        workers: None,
    }
}

fn density_sweep() -> Sweep {
    Sweep {
        axis: SweepAxis::Density,
        values: FIG3_DENSITIES.iter().map(|n| n * 1e18).collect(),
    }
}

/// Built-in scenario by name.
pub fn preset(name: &str) -> Option<Scenario> {
    let mut s = base(name);
    let a = s.atoms.total_decay;
    match name {
        "fig2" => {}
        "fig3a" => {
            s.lasers.omega_c = 0.56 * a;
            s.sweep = Some(density_sweep());
            s.outputs = Vec::new();
        }
        "fig3b" => {
            s.sweep = Some(density_sweep());
            s.outputs = Vec::new();
        }
        "fig4" => {
            // The narrowest pulse needs a finer τ grid.
            s.grid.n_tau = 4096;
            s.sweep = Some(Sweep {
                axis: SweepAxis::PulseWidth,
                values: vec![40.0 / a, 80.0 / a, 160.0 / a],
            });
        }
        "fig5" => {
            s.lasers.delta_c = -a;
            s.lasers.delta_p = -a;
        }
        "fig6" => {
            s.lasers.delta_c = -a;
            s.lasers.delta_p = -a;
            s.outputs = vec![OutputKind::Forces];
            s.slices = vec![Length::BeerLengths(0.0)];
        }
        _ => return None,
    }
    Some(s)
}
