//! Flat `key = value` scenario files.
//!
//! Rates take an `A` suffix for units of the total decay rate (`0.18A`) or
//! are read as rad/s. `pulse_width` accepts `80/A` or seconds, lengths
//! accept `63zeta_p` or metres, and `density` accepts `cm^-3` or m⁻³.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{GridSpec, Length, OutputKind, Scenario, Sweep, SweepAxis};
use crate::atomsys::{AtomParams, Geometry, LaserParams, SystemVariant};
use crate::error::{Error, Result};

const KEYS: [&str; 25] = [
    "A",
    "gamma_c",
    "gamma_p",
    "gamma_out",
    "gamma_cp",
    "lambda_c",
    "lambda_p",
    "mass",
    "geometry",
    "density",
    "omega_c",
    "omega_p_peak",
    "pulse_width",
    "delta_c",
    "delta_p",
    "z_max",
    "n_z",
    "n_tau",
    "variant",
    "momentum_mode",
    "sweep_axis",
    "sweep_values",
    "slices",
    "outputs",
    "label",
];

/// Extra key outside the physics set.
const WORKERS: &str = "workers";

const MANDATORY: [&str; 5] = ["density", "omega_c", "omega_p_peak", "pulse_width", "z_max"];

const DEFAULT_N_TAU: usize = 2048;
const DEFAULT_N_Z: usize = 256;

struct Entry {
    line: usize,
    value: String,
}

struct Parser<'a> {
    path: &'a Path,
    entries: HashMap<String, Entry>,
}

impl Parser<'_> {
    fn error(&self, key: &str, msg: String) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line: self.entries.get(key).map_or(0, |e| e.line),
            msg,
        }
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn get<T>(&self, key: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => parse(v)
                .map(Some)
                .ok_or_else(|| self.error(key, format!("cannot parse `{key} = {v}`"))),
        }
    }

    fn list<T>(&self, key: &str, parse: impl Fn(&str) -> Option<T>) -> Result<Option<Vec<T>>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|item| {
                    let item = item.trim();
                    parse(item).ok_or_else(|| {
                        self.error(key, format!("cannot parse `{item}` in `{key}`"))
                    })
                })
                .collect::<Result<Vec<_>>>()
                .map(Some),
        }
    }
}

fn number(s: &str) -> Option<f64> {
    s.trim().parse::<f64>().ok().filter(|v| v.is_finite())
}

/// `0.18A` → 0.18·A, bare numbers in rad/s.
fn rate(s: &str, a: f64) -> Option<f64> {
    let s = s.trim();
    match s.strip_suffix('A') {
        Some(head) if head.trim().is_empty() => Some(a),
        Some(head) => number(head.trim_end_matches('*')).map(|x| x * a),
        None => number(s),
    }
}

/// `80/A` → 80/A, bare numbers in seconds.
fn duration(s: &str, a: f64) -> Option<f64> {
    let s = s.trim();
    match s.strip_suffix("/A") {
        Some(head) => number(head).map(|x| x / a),
        None => number(s),
    }
}

fn length(s: &str) -> Option<Length> {
    let s = s.trim();
    if let Some(head) = s.strip_suffix("zeta_p") {
        return number(head.trim_end_matches('*')).map(Length::BeerLengths);
    }
    number(s.strip_suffix('m').unwrap_or(s)).map(Length::Meters)
}

fn density(s: &str) -> Option<f64> {
    let s = s.trim();
    match s.strip_suffix("cm^-3") {
        Some(head) => number(head).map(|x| x * 1e6),
        None => number(s.strip_suffix("m^-3").unwrap_or(s)),
    }
}

fn boolean(s: &str) -> Option<bool> {
    match s.trim() {
        "true" | "yes" | "on" | "1" => Some(true),
        "false" | "no" | "off" | "0" => Some(false),
        _ => None,
    }
}

fn count(s: &str) -> Option<usize> {
    s.trim().parse().ok()
}

fn split_lines<'a>(text: &str, path: &'a Path) -> Result<Parser<'a>> {
    let mut entries: HashMap<String, Entry> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let parse_error = |msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let Some((key, value)) = content.split_once('=') else {
            return Err(parse_error(format!("expected `key = value`, got `{content}`")));
        };
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) && key != WORKERS {
            return Err(parse_error(format!("unknown key `{key}`")));
        }
        if value.is_empty() {
            return Err(parse_error(format!("empty value for `{key}`")));
        }
        if let Some(previous) = entries.get(key) {
            return Err(parse_error(format!(
                "duplicate key `{key}` (first set on line {})",
                previous.line
            )));
        }
        entries.insert(
            key.to_string(),
            Entry {
                line,
                value: value.to_string(),
            },
        );
    }
    Ok(Parser { path, entries })
}

/// Parses scenario text. Keys absent from the text come from `base` when
/// given; otherwise atoms default to sodium D2 and the keys `density`,
/// `omega_c`, `omega_p_peak`, `pulse_width` and `z_max` are required.
pub fn parse_scenario(text: &str, path: &Path, base: Option<&Scenario>) -> Result<Scenario> {
    let p = split_lines(text, path)?;
    if base.is_none() {
        if let Some(missing) = MANDATORY.iter().find(|k| p.raw(k).is_none()) {
            return Err(Error::Validation(format!("missing mandatory key `{missing}`")));
        }
    }
    let sodium = AtomParams::sodium_d2();
    let atoms0 = base.map_or(sodium, |b| b.atoms);
    let a = p.get("A", number)?.unwrap_or(atoms0.total_decay);
    // Branches not given keep their share of A.
    let scale = a / atoms0.total_decay;
    let branch = |key: &str, old: f64| -> Result<f64> {
        Ok(p.get(key, |s| rate(s, a))?.unwrap_or(old * scale))
    };
    let atoms = AtomParams::from_rates(
        a,
        branch("gamma_c", atoms0.gamma_c)?,
        branch("gamma_p", atoms0.gamma_p)?,
        branch("gamma_out", atoms0.gamma_out)?,
        p.get("gamma_cp", |s| rate(s, a))?.unwrap_or(atoms0.gamma_cp),
        p.get("mass", number)?.unwrap_or(atoms0.mass),
        p.get("lambda_c", number)?.unwrap_or(atoms0.lambda_c),
        p.get("lambda_p", number)?.unwrap_or(atoms0.lambda_p),
        p.get("geometry", Geometry::from_name)?.unwrap_or(atoms0.geometry),
    )
    .map_err(|e| Error::Validation(e.to_string()))?;

    let zero_lasers = LaserParams {
        omega_c: 0.0,
        omega_p_peak: 0.0,
        pulse_width: 0.0,
        delta_c: 0.0,
        delta_p: 0.0,
        density: 0.0,
    };
    let l0 = base.map_or(zero_lasers, |b| b.lasers);
    let lasers = LaserParams {
        omega_c: p.get("omega_c", |s| rate(s, a))?.unwrap_or(l0.omega_c),
        omega_p_peak: p.get("omega_p_peak", |s| rate(s, a))?.unwrap_or(l0.omega_p_peak),
        pulse_width: p.get("pulse_width", |s| duration(s, a))?.unwrap_or(l0.pulse_width),
        delta_c: p.get("delta_c", |s| rate(s, a))?.unwrap_or(l0.delta_c),
        delta_p: p.get("delta_p", |s| rate(s, a))?.unwrap_or(l0.delta_p),
        density: p.get("density", density)?.unwrap_or(l0.density),
    };

    let g0 = base.map(|b| b.grid);
    let grid = GridSpec {
        n_tau: p.get("n_tau", count)?.or(g0.map(|g| g.n_tau)).unwrap_or(DEFAULT_N_TAU),
        n_z: p.get("n_z", count)?.or(g0.map(|g| g.n_z)).unwrap_or(DEFAULT_N_Z),
        z_max: match p.get("z_max", length)? {
            Some(z) => z,
            None => g0.map(|g| g.z_max).expect("z_max is mandatory without a base"),
        },
    };

    let axis = p.get("sweep_axis", |s| {
        if s == "none" {
            Some(None)
        } else {
            SweepAxis::from_name(s).map(Some)
        }
    })?;
    let sweep = match (axis, p.raw("sweep_values")) {
        (Some(None), _) => None,
        (Some(Some(axis)), Some(_)) => {
            let values = p.list("sweep_values", |s| sweep_value(axis, s, a))?.unwrap_or_default();
            Some(Sweep { axis, values })
        }
        (Some(Some(_)), None) => {
            return Err(Error::Validation("sweep_axis given without sweep_values".into()));
        }
        (None, Some(_)) => {
            let axis = base
                .and_then(|b| b.sweep.as_ref())
                .map(|s| s.axis)
                .ok_or_else(|| Error::Validation("sweep_values given without sweep_axis".into()))?;
            let values = p.list("sweep_values", |s| sweep_value(axis, s, a))?.unwrap_or_default();
            Some(Sweep { axis, values })
        }
        (None, None) => base.and_then(|b| b.sweep.clone()),
    };

    let default_label = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("scenario")
        .to_string();
    let scenario = Scenario {
        atoms,
        lasers,
        grid,
        variant: p
            .get("variant", SystemVariant::from_name)?
            .or(base.map(|b| b.variant))
            .unwrap_or_default(),
        momentum_mode: p
            .get("momentum_mode", boolean)?
            .or(base.map(|b| b.momentum_mode))
            .unwrap_or(false),
        sweep,
        outputs: p
            .list("outputs", OutputKind::from_name)?
            .or(base.map(|b| b.outputs.clone()))
            .unwrap_or_else(|| vec![OutputKind::Pulse]),
        slices: p
            .list("slices", length)?
            .or(base.map(|b| b.slices.clone()))
            .unwrap_or_default(),
        label: p
            .raw("label")
            .map(str::to_string)
            .or(base.map(|b| b.label.clone()))
            .unwrap_or(default_label),
        workers: match p.raw(WORKERS) {
            Some("auto") => None,
            Some(_) => p.get(WORKERS, count)?,
            None => base.and_then(|b| b.workers),
        },
    };
    scenario.validate().map_err(|e| match e {
        Error::InvalidParameter(msg) => Error::Validation(msg),
        other => other,
    })?;
    Ok(scenario)
}

fn sweep_value(axis: SweepAxis, s: &str, a: f64) -> Option<f64> {
    match axis {
        SweepAxis::Density => density(s),
        SweepAxis::PulseWidth => duration(s, a),
        SweepAxis::OmegaC | SweepAxis::GammaCp | SweepAxis::Delta => rate(s, a),
    }
}

pub fn load_scenario(path: &Path) -> Result<Scenario> {
    load_scenario_with(path, None)
}

/// Loads a file whose keys override `base`.
pub fn load_scenario_with(path: &Path, base: Option<&Scenario>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario(&text, path, base)
}

fn length_text(l: Length) -> String {
    match l {
        Length::Meters(m) => format!("{m:e}"),
        Length::BeerLengths(n) => format!("{n}zeta_p"),
    }
}

fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
    items.iter().map(f).collect::<Vec<_>>().join(", ")
}

/// Canonical text form, all quantities in SI so reloading is exact.
pub fn scenario_to_string(s: &Scenario) -> String {
    let at = &s.atoms;
    let la = &s.lasers;
    let mut out = String::new();
    let mut put = |k: &str, v: String| {
        let _ = writeln!(out, "{k} = {v}");
    };
    put("label", s.label.clone());
    put("A", format!("{:e}", at.total_decay));
    put("gamma_c", format!("{:e}", at.gamma_c));
    put("gamma_p", format!("{:e}", at.gamma_p));
    put("gamma_out", format!("{:e}", at.gamma_out));
    put("gamma_cp", format!("{:e}", at.gamma_cp));
    put("lambda_c", format!("{:e}", at.lambda_c));
    put("lambda_p", format!("{:e}", at.lambda_p));
    put("mass", format!("{:e}", at.mass));
    put("geometry", at.geometry.name().into());
    put("density", format!("{:e}", la.density));
    put("omega_c", format!("{:e}", la.omega_c));
    put("omega_p_peak", format!("{:e}", la.omega_p_peak));
    put("pulse_width", format!("{:e}", la.pulse_width));
    put("delta_c", format!("{:e}", la.delta_c));
    put("delta_p", format!("{:e}", la.delta_p));
    put("z_max", length_text(s.grid.z_max));
    put("n_z", s.grid.n_z.to_string());
    put("n_tau", s.grid.n_tau.to_string());
    put("variant", s.variant.name().into());
    put("momentum_mode", s.momentum_mode.to_string());
    match &s.sweep {
        Some(sw) => {
            put("sweep_axis", sw.axis.name().into());
            put("sweep_values", join(&sw.values, |v| format!("{v:e}")));
        }
        None => put("sweep_axis", "none".into()),
    }
    if !s.slices.is_empty() {
        put("slices", join(&s.slices, |l| length_text(*l)));
    }
    if !s.outputs.is_empty() {
        put("outputs", join(&s.outputs, |o| o.name().to_string()));
    }
    put(WORKERS, s.workers.map_or("auto".into(), |w| w.to_string()));
    out
}

pub fn save_scenario(scenario: &Scenario, path: &Path) -> Result<()> {
    std::fs::write(path, scenario_to_string(scenario))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const FIG2_TEXT: &str = "\
# slow light through sodium
density = 3.3e12 cm^-3
omega_c = 0.18A
omega_p_peak = 0.1A   # weak probe
pulse_width = 80/A
z_max = 63zeta_p
";

    fn parse(text: &str) -> Result<Scenario> {
        parse_scenario(text, Path::new("test.cfg"), None)
    }

    #[test]
    fn units() {
        let s = parse(FIG2_TEXT).unwrap();
        let a = s.atoms.total_decay;
        assert_relative_eq!(s.lasers.density, 3.3e18, max_relative = 1e-15);
        assert_relative_eq!(s.lasers.omega_c, 0.18 * a);
        assert_relative_eq!(s.lasers.pulse_width, 80.0 / a);
        assert_eq!(s.grid.z_max, Length::BeerLengths(63.0));
        assert_eq!(s.atoms, AtomParams::sodium_d2());
        assert_eq!(s.label, "test");
        assert_eq!(rate("A", 2.0), Some(2.0));
        assert_eq!(rate("3e6", 2.0), Some(3e6));
        assert_eq!(length("1e-3m"), Some(Length::Meters(1e-3)));
        assert_eq!(density("5e18"), Some(5e18));
    }

    #[test]
    fn missing_density_names_the_key() {
        let text = FIG2_TEXT.replace("density = 3.3e12 cm^-3\n", "");
        let err = parse(&text).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains("`density`"), "{err}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = format!("{FIG2_TEXT}colour = blue\n");
        match parse(&text).unwrap_err() {
            Error::Parse { line, msg, .. } => {
                assert_eq!(line, 7);
                assert!(msg.contains("unknown key"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let text = FIG2_TEXT.replace("80/A", "eighty");
        match parse(&text).unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 5),
            other => panic!("unexpected {other:?}"),
        }
        let text = format!("{FIG2_TEXT}omega_c = 0.2A\n");
        assert!(matches!(parse(&text).unwrap_err(), Error::Parse { line: 7, .. }));
        assert!(matches!(parse("just words").unwrap_err(), Error::Parse { line: 1, .. }));
    }

    #[test]
    fn invariant_violations_are_validation_errors() {
        let slices = format!("{FIG2_TEXT}slices = 0zeta_p, 80zeta_p\n");
        assert!(matches!(parse(&slices).unwrap_err(), Error::Validation(_)));
        let sweep = format!("{FIG2_TEXT}sweep_axis = pulse_width\nsweep_values = 40/A, -1\n");
        assert!(matches!(parse(&sweep).unwrap_err(), Error::Validation(_)));
        let branches = format!("{FIG2_TEXT}gamma_out = 0.5A\n");
        assert!(parse(&branches).unwrap_err().is_validation());
        let vacuum = FIG2_TEXT.replace("3.3e12 cm^-3", "0");
        assert!(matches!(parse(&vacuum).unwrap_err(), Error::Validation(_)));
    }

    #[test]
    fn changing_a_keeps_branch_ratios() {
        let s = parse(&format!("{FIG2_TEXT}A = 1e7\n")).unwrap();
        assert_relative_eq!(s.atoms.gamma_c, 1e7 / 3.0, max_relative = 1e-15);
        assert_relative_eq!(s.atoms.gamma_out, 1e7 / 6.0, max_relative = 1e-15);
    }

    #[test]
    fn round_trip_is_identity() {
        let text = format!(
            "{FIG2_TEXT}gamma_cp = 0.001A\ndelta_c = -1A\ndelta_p = -0.7A\nsweep_axis = density\n\
             sweep_values = 0.5e12cm^-3, 1e12cm^-3\nslices = 0zeta_p, 1e-5m\noutputs = pulse, forces\n\
             workers = 3\nmomentum_mode = true\nvariant = closed_repumped\ngeometry = counterpropagating\n"
        );
        let s = parse(&text).unwrap();
        let back = parse(&scenario_to_string(&s)).unwrap();
        assert_eq!(s, back);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("test.cfg");
        save_scenario(&s, &path).unwrap();
        assert_eq!(load_scenario(&path).unwrap(), s);
    }

    #[test]
    fn base_fills_absent_keys() {
        let base = parse(FIG2_TEXT).unwrap();
        let s = parse_scenario("omega_c = 0.56A\n", Path::new("x.cfg"), Some(&base)).unwrap();
        assert_relative_eq!(s.lasers.omega_c, 0.56 * s.atoms.total_decay);
        assert_eq!(s.lasers.density, base.lasers.density);
        assert_eq!(s.label, base.label);
    }
}
