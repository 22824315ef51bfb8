use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use slowlight::scenarios::{self, Scenario};
use slowlight::Error;

const EXIT_IO: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Parser)]
#[command(name = "slowlight", version, about = "Slow-light pulse propagation in open Λ atoms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write CSV tables.
    Run {
        /// `key = value` scenario file; its keys override the preset, if any.
        scenario: PathBuf,
        /// Start from a built-in scenario.
        #[arg(long)]
        preset: Option<String>,
        /// Output directory.
        #[arg(long, default_value = "slowlight-out")]
        out: PathBuf,
        /// Worker threads for sweep points.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// List built-in scenarios.
    Presets,
}

fn describe(s: &Scenario) -> String {
    let a = s.atoms.total_decay;
    let mut parts = vec![
        format!("omega_c = {}A", s.lasers.omega_c / a),
        format!("T = {}/A", s.lasers.pulse_width * a),
    ];
    if s.lasers.delta_p != 0.0 {
        parts.push(format!("delta = {}A", s.lasers.delta_p / a));
    }
    if let Some(sweep) = &s.sweep {
        parts.push(format!("{} sweep ({} points)", sweep.axis.name(), sweep.values.len()));
    }
    let outputs: Vec<_> = s.outputs.iter().map(|o| o.name()).collect();
    if !outputs.is_empty() {
        parts.push(format!("tables: {}", outputs.join(", ")));
    }
    parts.join(", ")
}

fn fail(err: &Error, code: u8) -> ExitCode {
    eprintln!("error: {err}");
    ExitCode::from(code)
}

fn run(scenario: PathBuf, preset: Option<String>, out: PathBuf, workers: Option<usize>) -> ExitCode {
    let base = match preset.as_deref() {
        None => None,
        Some(name) => match scenarios::preset(name) {
            Some(s) => Some(s),
            None => {
                eprintln!(
                    "error: unknown preset `{name}` (available: {})",
                    scenarios::preset_names().join(", ")
                );
                return ExitCode::from(EXIT_VALIDATION);
            }
        },
    };
    let mut scenario = match scenarios::load_scenario_with(&scenario, base.as_ref()) {
        Ok(s) => s,
        Err(e) => return fail(&e, EXIT_VALIDATION),
    };
    if workers.is_some() {
        scenario.workers = workers;
    }
    let record = match scenarios::run(&scenario) {
        Ok(r) => r,
        Err(e) if e.is_validation() => return fail(&e, EXIT_VALIDATION),
        Err(e) => return fail(&e, EXIT_SOLVER),
    };
    for p in &record.points {
        let m = &p.exit;
        let value = p.sweep_value.map_or(String::new(), |v| format!(" value={v:e}"));
        println!(
            "point {}{value}: v_g = {:.4} m/s, delay = {:.4e} s, peak transmission = {:.4}, trace drift = {:.1e}, {:.2?}",
            p.index, m.group_velocity, m.delay, m.transmission_peak, p.result.stats.max_trace_drift, p.wall_time
        );
    }
    match scenarios::emit_csv(&record, &out) {
        Ok(paths) => {
            for path in paths {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e, EXIT_IO),
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Presets => {
            for &name in scenarios::preset_names() {
                let s = scenarios::preset(name).expect("listed presets exist");
                println!("{name:<6} {}", describe(&s));
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            scenario,
            preset,
            out,
            workers,
        } => run(scenario, preset, out, workers),
    }
}
