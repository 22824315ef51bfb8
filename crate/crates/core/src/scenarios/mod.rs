//! Declarative experiment descriptions, presets, sweeps and CSV output.
//!
//! A [`Scenario`] is one propagation setup plus an optional one-axis sweep.
//! Lengths that scale with the medium (`z_max`, output slices) may be given
//! in Beer lengths, so a density sweep keeps the optical depth fixed.

mod config;
mod output;
mod presets;

use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::atomsys::{AtomParams, LaserParams, SystemVariant};
use crate::diagnostics::{self, EitLength, PulseMetrics};
use crate::error::{Error, Result};
use crate::maxwell_bloch::{propagate, Grid, Medium, PropagationResult, PropagationSetup, TRACE_TOLERANCE};

pub use config::{load_scenario, load_scenario_with, parse_scenario, save_scenario, scenario_to_string};
pub use output::{emit_csv, FORCES_HEADER, METRICS_HEADER, PULSE_HEADER};
pub use presets::{preset, preset_names, PresetSource, PRESET_SOURCES};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Density,
    OmegaC,
    PulseWidth,
    GammaCp,
    /// Common detuning `δ_c = δ_p`, keeping the Raman resonance.
    Delta,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 5] = [
        SweepAxis::Density,
        SweepAxis::OmegaC,
        SweepAxis::PulseWidth,
        SweepAxis::GammaCp,
        SweepAxis::Delta,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Density => "density",
            SweepAxis::OmegaC => "omega_c",
            SweepAxis::PulseWidth => "pulse_width",
            SweepAxis::GammaCp => "gamma_cp",
            SweepAxis::Delta => "delta",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    /// SI unit of the axis values.
    pub fn unit(self) -> &'static str {
        match self {
            SweepAxis::Density => "m^-3",
            SweepAxis::PulseWidth => "s",
            SweepAxis::OmegaC | SweepAxis::GammaCp | SweepAxis::Delta => "rad/s",
        }
    }

    fn check(self, value: f64) -> Result<()> {
        let ok = value.is_finite()
            && match self {
                SweepAxis::PulseWidth => value > 0.0,
                SweepAxis::Density | SweepAxis::OmegaC | SweepAxis::GammaCp => value >= 0.0,
                SweepAxis::Delta => true,
            };
        if ok {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "sweep value {value} is not allowed on axis {}",
                self.name()
            )))
        }
    }

    fn apply(self, value: f64, atoms: &mut AtomParams, lasers: &mut LaserParams) {
        match self {
            SweepAxis::Density => lasers.density = value,
            SweepAxis::OmegaC => lasers.omega_c = value,
            SweepAxis::PulseWidth => lasers.pulse_width = value,
            SweepAxis::GammaCp => atoms.gamma_cp = value,
            SweepAxis::Delta => {
                lasers.delta_c = value;
                lasers.delta_p = value;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub axis: SweepAxis,
    /// Values in the SI unit of the axis.
    pub values: Vec<f64>,
}

/// A depth, either absolute or in Beer lengths `ζ_p` of the medium.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Length {
    Meters(f64),
    BeerLengths(f64),
}

impl Length {
    pub fn resolve(self, zeta_p: f64) -> f64 {
        match self {
            Length::Meters(m) => m,
            Length::BeerLengths(n) if n == 0.0 => 0.0,
            Length::BeerLengths(n) => n * zeta_p,
        }
    }

    fn label(self, z: f64) -> String {
        match self {
            Length::BeerLengths(n) => format!("{n}"),
            Length::Meters(_) => format!("{z}m"),
        }
    }
}

/// Space–time resolution; the τ window is sized per sweep point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n_tau: usize,
    pub n_z: usize,
    pub z_max: Length,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    Metrics,
    Pulse,
    Forces,
}

impl OutputKind {
    pub fn name(self) -> &'static str {
        match self {
            OutputKind::Metrics => "metrics",
            OutputKind::Pulse => "pulse",
            OutputKind::Forces => "forces",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [OutputKind::Metrics, OutputKind::Pulse, OutputKind::Forces]
            .into_iter()
            .find(|k| k.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub atoms: AtomParams,
    pub lasers: LaserParams,
    pub grid: GridSpec,
    pub variant: SystemVariant,
    pub momentum_mode: bool,
    pub sweep: Option<Sweep>,
    /// Tables to write besides `metrics.csv`.
    pub outputs: Vec<OutputKind>,
    /// Stored depths; empty selects the [`DEFAULT_SLICES`] inside the medium.
    pub slices: Vec<Length>,
    pub label: String,
    /// Worker threads for sweep points; `None` uses all cores.
    pub workers: Option<usize>,
}

/// Slices written when a scenario does not list any.
pub const DEFAULT_SLICES: [Length; 3] = [
    Length::BeerLengths(0.0),
    Length::BeerLengths(30.0),
    Length::BeerLengths(63.0),
];

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.atoms.validate()?;
        self.lasers.validate()?;
        if self.grid.n_tau < 2 || self.grid.n_z < 1 {
            return Err(Error::Validation("n_tau must be >= 2 and n_z >= 1".into()));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::Validation("sweep_values is empty".into()));
            }
            for &v in &sweep.values {
                sweep.axis.check(v)?;
            }
        }
        if self.workers == Some(0) {
            return Err(Error::Validation("workers must be >= 1".into()));
        }
        for point in 0..self.point_count() {
            let (atoms, lasers) = self.point_params(point);
            let zeta = Medium::new(&atoms, lasers.density).beer_length(&atoms);
            let z_max = self.grid.z_max.resolve(zeta);
            if !(z_max.is_finite() && z_max >= 0.0) {
                return Err(Error::Validation(format!(
                    "z_max resolves to {z_max} m; Beer-length units need a nonzero density"
                )));
            }
            for s in &self.slices {
                let z = s.resolve(zeta);
                if !(z >= 0.0 && z <= z_max * (1.0 + 1e-12)) {
                    return Err(Error::Validation(format!(
                        "slice at z = {z} m lies outside [0, z_max = {z_max} m]"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn point_count(&self) -> usize {
        self.sweep.as_ref().map_or(1, |s| s.values.len())
    }

    fn point_value(&self, index: usize) -> Option<(SweepAxis, f64)> {
        self.sweep.as_ref().map(|s| (s.axis, s.values[index]))
    }

    /// Atom and laser parameters at one sweep point.
    pub fn point_params(&self, index: usize) -> (AtomParams, LaserParams) {
        let mut atoms = self.atoms;
        let mut lasers = self.lasers;
        if let Some((axis, value)) = self.point_value(index) {
            axis.apply(value, &mut atoms, &mut lasers);
        }
        (atoms, lasers)
    }

    /// The propagation setup for one sweep point, with slice labels.
    pub fn point_setup(&self, index: usize) -> (PropagationSetup, Vec<String>) {
        let (atoms, lasers) = self.point_params(index);
        let zeta = Medium::new(&atoms, lasers.density).beer_length(&atoms);
        let z_max = self.grid.z_max.resolve(zeta);
        let grid = Grid::sized_for(&atoms, &lasers, z_max, self.grid.n_z, self.grid.n_tau);
        let requested: Vec<Length> = if self.slices.is_empty() {
            DEFAULT_SLICES
                .into_iter()
                .filter(|s| s.resolve(zeta) <= z_max * (1.0 + 1e-12))
                .collect()
        } else {
            self.slices.clone()
        };
        let (slices, labels) = requested
            .iter()
            .map(|s| {
                let z = s.resolve(zeta).min(z_max);
                (z, s.label(z))
            })
            .unzip();
        let setup = PropagationSetup {
            atoms,
            lasers,
            grid,
            variant: self.variant,
            momentum_mode: self.momentum_mode,
            slices,
        };
        (setup, labels)
    }
}

/// Force-trace summary at one slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceSummary {
    pub z: f64,
    pub max_rp: f64,
    pub max_dip: f64,
    pub impulse_rp: f64,
    pub impulse_dip: f64,
    pub normalized_impulse_rp: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PointRecord {
    pub index: usize,
    pub sweep_value: Option<f64>,
    /// Metrics at the requested slices, in the order requested.
    pub slice_metrics: Vec<PulseMetrics>,
    pub slice_labels: Vec<String>,
    /// Metrics at `z_max`.
    pub exit: PulseMetrics,
    /// Transparency window for interaction time `T`, if defined.
    pub transparency_window: Option<f64>,
    pub eit_length: EitLength,
    /// `max |Ω₋|/Ω` of the input pulses.
    pub adiabaticity: f64,
    /// Coupling modulation travelling with the probe at `z_max`.
    pub adiabaton_depth: f64,
    pub forces: Vec<ForceSummary>,
    pub wall_time: Duration,
    pub result: PropagationResult,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub scenario: Scenario,
    pub points: Vec<PointRecord>,
}

impl RunRecord {
    pub fn max_trace_drift(&self) -> f64 {
        self.points
            .iter()
            .fold(0.0, |m, p| m.max(p.result.stats.max_trace_drift))
    }
}

fn run_point(scenario: &Scenario, index: usize) -> Result<PointRecord> {
    let start = Instant::now();
    let (setup, slice_labels) = scenario.point_setup(index);
    let result = propagate(&setup)?;
    let atoms = &setup.atoms;
    let lasers = &setup.lasers;

    let slice_metrics = setup
        .slices
        .iter()
        .map(|&z| diagnostics::pulse_metrics(&result, z))
        .collect::<Result<Vec<_>>>()?;
    let exit_z = result.output().z;
    let exit = diagnostics::pulse_metrics(&result, exit_z)?;
    let transparency_window =
        diagnostics::transparency_window(atoms, lasers, lasers.pulse_width, setup.variant).ok();
    let adiabaticity = match diagnostics::adiabaticity_profile(&result.tau, &result.input().fields) {
        Ok(p) => p.max_ratio,
        Err(Error::DegenerateField(_)) => f64::NAN,
        Err(e) => return Err(e),
    };
    let forces = if scenario.outputs.contains(&OutputKind::Forces) {
        setup
            .slices
            .iter()
            .map(|&z| {
                let trace = diagnostics::forces(&result, z, atoms)?;
                Ok(ForceSummary {
                    z: trace.z,
                    max_rp: trace.max_abs_rp(),
                    max_dip: trace.max_abs_dip(),
                    impulse_rp: trace.impulse_rp,
                    impulse_dip: trace.impulse_dip,
                    normalized_impulse_rp: trace.normalized_impulse_rp(result.dtau()),
                })
            })
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };
    if result.stats.max_trace_drift > TRACE_TOLERANCE {
        return Err(Error::Integration(format!(
            "trace drift {:e} exceeds {:e}",
            result.stats.max_trace_drift, TRACE_TOLERANCE
        )));
    }
    Ok(PointRecord {
        index,
        sweep_value: scenario.point_value(index).map(|(_, v)| v),
        slice_metrics,
        slice_labels,
        exit,
        transparency_window,
        eit_length: diagnostics::eit_absorption_length(atoms, lasers),
        adiabaticity,
        adiabaton_depth: diagnostics::adiabaton_depth(&result, exit_z)?,
        forces,
        wall_time: start.elapsed(),
        result,
    })
}

/// Runs every sweep point on a pool of `scenario.workers` threads. Records
/// come back in sweep order regardless of scheduling.
pub fn run(scenario: &Scenario) -> Result<RunRecord> {
    scenario.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = scenario.workers {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Validation(format!("cannot start worker pool: {e}")))?;
    let points = pool.install(|| {
        (0..scenario.point_count())
            .into_par_iter()
            .map(|index| {
                run_point(scenario, index).map_err(|e| match scenario.point_value(index) {
                    Some((axis, value)) => Error::SweepPoint {
                        index,
                        axis: axis.name(),
                        value,
                        source: Box::new(e),
                    },
                    None => e,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(RunRecord {
        scenario: scenario.clone(),
        points,
    })
}
