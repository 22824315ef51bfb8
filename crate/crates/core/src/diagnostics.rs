//! Observables extracted from a [`PropagationResult`].
//!
//! Integrals over τ use the trapezoidal rule on the stored grid. Attenuation
//! lengths are quoted as field-amplitude e-folding lengths, the convention of
//! `ζ_p = A/κ_p`: a pulse whose energy falls as `exp(−2z/L)` has length `L`.

use num_complex::Complex64;

use crate::atomsys::{AtomParams, BlochState, LaserParams, SystemVariant};
use crate::constants::{HBAR, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::maxwell_bloch::{FieldEnvelope, PropagationResult, Slice};

/// Pulse observables at one depth, relative to the input pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseMetrics {
    pub z: f64,
    /// Centroid delay `τ_d(z)` (s).
    pub delay: f64,
    /// `c / (1 + c τ_d / z)`; equal to `c` at `z = 0`.
    pub group_velocity: f64,
    pub transmission_energy: f64,
    pub transmission_peak: f64,
    /// Width `T` of the Gaussian `exp(−τ²/2T²)` with the same second moment.
    pub fitted_width: f64,
}

/// Radiation-pressure and dipole forces on the atoms at one depth.
#[derive(Debug, Clone, PartialEq)]
pub struct ForceTrace {
    pub z: f64,
    pub f_rp: Vec<f64>,
    pub f_dip: Vec<f64>,
    pub impulse_rp: f64,
    pub impulse_dip: f64,
}

impl ForceTrace {
    pub fn max_abs_rp(&self) -> f64 {
        max_abs(&self.f_rp)
    }

    pub fn max_abs_dip(&self) -> f64 {
        max_abs(&self.f_dip)
    }

    /// `|∫F_rp dτ| / ∫|F_rp| dτ`: zero for a perfectly antisymmetric trace.
    pub fn normalized_impulse_rp(&self, dtau: f64) -> f64 {
        let total = trapezoid(self.f_rp.iter().map(|f| f.abs()), dtau);
        if total == 0.0 {
            0.0
        } else {
            self.impulse_rp.abs() / total
        }
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub(crate) fn trapezoid(values: impl Iterator<Item = f64>, h: f64) -> f64 {
    let mut sum = 0.0;
    let mut first = None;
    let mut last = 0.0;
    for v in values {
        if first.is_none() {
            first = Some(v);
        }
        sum += v;
        last = v;
    }
    match first {
        None => 0.0,
        Some(f) => h * (sum - 0.5 * (f + last)),
    }
}

fn probe_energy(slice: &Slice, dtau: f64) -> f64 {
    trapezoid(slice.fields.omega_p.iter().map(|z| z.norm_sqr()), dtau)
}

fn probe_centroid(slice: &Slice, tau: &[f64], dtau: f64) -> Result<f64> {
    let energy = probe_energy(slice, dtau);
    if !(energy > 0.0) {
        return Err(Error::ZeroProbeEnergy { z: slice.z });
    }
    let first = trapezoid(
        slice.fields.omega_p.iter().zip(tau).map(|(z, t)| z.norm_sqr() * t),
        dtau,
    );
    Ok(first / energy)
}

fn probe_rms_width(slice: &Slice, tau: &[f64], dtau: f64) -> Result<f64> {
    let energy = probe_energy(slice, dtau);
    let mean = probe_centroid(slice, tau, dtau)?;
    let second = trapezoid(
        slice
            .fields
            .omega_p
            .iter()
            .zip(tau)
            .map(|(z, t)| z.norm_sqr() * (t - mean).powi(2)),
        dtau,
    );
    Ok((second / energy).sqrt())
}

fn peak(values: &[Complex64]) -> f64 {
    values.iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Centroid delay of the probe at `z`, measured from the centroid of the
/// stored input pulse so quadrature bias on the window cancels.
pub fn pulse_delay(result: &PropagationResult, z: f64) -> Result<f64> {
    let dtau = result.dtau();
    let slice = result.slice_at(z)?;
    let here = probe_centroid(slice, &result.tau, dtau)?;
    let input = probe_centroid(result.input(), &result.tau, dtau)?;
    Ok(here - input)
}

pub fn group_velocity_from_delay(delay: f64, z: f64) -> f64 {
    SPEED_OF_LIGHT / (1.0 + SPEED_OF_LIGHT * delay / z)
}

pub fn group_velocity(result: &PropagationResult, z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "group velocity needs z > 0, got {z}"
        )));
    }
    let slice = result.slice_at(z)?;
    Ok(group_velocity_from_delay(pulse_delay(result, z)?, slice.z))
}

pub fn pulse_metrics(result: &PropagationResult, z: f64) -> Result<PulseMetrics> {
    let dtau = result.dtau();
    let slice = result.slice_at(z)?;
    let input = result.input();
    let delay = pulse_delay(result, z)?;
    let group_velocity = if slice.z > 0.0 {
        group_velocity_from_delay(delay, slice.z)
    } else {
        SPEED_OF_LIGHT
    };
    Ok(PulseMetrics {
        z: slice.z,
        delay,
        group_velocity,
        transmission_energy: probe_energy(slice, dtau) / probe_energy(input, dtau),
        transmission_peak: peak(&slice.fields.omega_p) / peak(&input.fields.omega_p),
        fitted_width: std::f64::consts::SQRT_2 * probe_rms_width(slice, &result.tau, dtau)?,
    })
}

/// Nonadiabatic coupling `Ω₋ = (Ω̇_c Ω_p − Ω̇_p Ω_c)/Ω²` along a slice.
#[derive(Debug, Clone, PartialEq)]
pub struct AdiabaticityProfile {
    pub omega_minus: Vec<f64>,
    pub omega: Vec<f64>,
    /// `max_τ |Ω₋(τ)| / Ω(τ)`; the adiabatic regime needs this ≪ 1.
    pub max_ratio: f64,
}

/// Uses the field magnitudes and central differences (one-sided at the
/// window edges).
pub fn adiabaticity_profile(tau: &[f64], fields: &FieldEnvelope) -> Result<AdiabaticityProfile> {
    let n = tau.len();
    if n < 3 || fields.len() != n {
        return Err(Error::InvalidParameter(
            "adiabaticity profile needs at least three matching samples".into(),
        ));
    }
    let c: Vec<f64> = fields.omega_c.iter().map(|z| z.norm()).collect();
    let p: Vec<f64> = fields.omega_p.iter().map(|z| z.norm()).collect();
    let derivative = |v: &[f64], j: usize| match j {
        0 => (v[1] - v[0]) / (tau[1] - tau[0]),
        j if j == n - 1 => (v[j] - v[j - 1]) / (tau[j] - tau[j - 1]),
        j => (v[j + 1] - v[j - 1]) / (tau[j + 1] - tau[j - 1]),
    };
    let mut omega_minus = Vec::with_capacity(n);
    let mut omega = Vec::with_capacity(n);
    let mut max_ratio: f64 = 0.0;
    for j in 0..n {
        let total_sq = c[j] * c[j] + p[j] * p[j];
        if total_sq == 0.0 {
            return Err(Error::DegenerateField("adiabaticity needs Ω > 0 everywhere"));
        }
        let om = (derivative(&c, j) * p[j] - derivative(&p, j) * c[j]) / total_sq;
        let total = total_sq.sqrt();
        max_ratio = max_ratio.max(om.abs() / total);
        omega_minus.push(om);
        omega.push(total);
    }
    Ok(AdiabaticityProfile {
        omega_minus,
        omega,
        max_ratio,
    })
}

/// EIT transparency window for an interaction time `Θ`.
///
/// Closed system: `Ω²/A + 1/Θ`. Open system:
/// `Ω²/(2√(AΘ)) · √((1 + Γ_p/Γ_out)/Ω_p² + (1 + Γ_c/Γ_out)/Ω_c²)`.
/// `Ω_p` is the probe peak.
pub fn transparency_window(
    atoms: &AtomParams,
    lasers: &LaserParams,
    interaction_time: f64,
    variant: SystemVariant,
) -> Result<f64> {
    if !(interaction_time > 0.0) {
        return Err(Error::InvalidParameter("interaction time must be positive".into()));
    }
    let a = atoms.total_decay;
    let (oc2, op2) = (lasers.omega_c.powi(2), lasers.omega_p_peak.powi(2));
    let omega_sq = oc2 + op2;
    match variant {
        SystemVariant::ClosedRepumped => Ok(omega_sq / a + 1.0 / interaction_time),
        SystemVariant::Open => {
            if atoms.gamma_out <= 0.0 {
                return Err(Error::InvalidParameter(
                    "open-system window needs gamma_out > 0".into(),
                ));
            }
            if oc2 == 0.0 || op2 == 0.0 {
                return Err(Error::DegenerateField("open-system window needs both Rabi frequencies"));
            }
            let branch = (1.0 + atoms.gamma_p / atoms.gamma_out) / op2
                + (1.0 + atoms.gamma_c / atoms.gamma_out) / oc2;
            Ok(omega_sq / (2.0 * (a * interaction_time).sqrt()) * branch.sqrt())
        }
    }
}

/// Resonant EIT absorption length; unbounded without ground decoherence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EitLength {
    Finite(f64),
    Unbounded,
}

impl EitLength {
    pub fn meters(self) -> f64 {
        match self {
            EitLength::Finite(m) => m,
            EitLength::Unbounded => f64::INFINITY,
        }
    }
}

/// `ζ_p^EIT = (A/κ_p) [Ω_c²/(2γ_cp A) + 1]`.
pub fn eit_absorption_length(atoms: &AtomParams, lasers: &LaserParams) -> EitLength {
    let kappa_p = crate::maxwell_bloch::Medium::new(atoms, lasers.density).kappa_p;
    if atoms.gamma_cp <= 0.0 || kappa_p == 0.0 {
        return EitLength::Unbounded;
    }
    let a = atoms.total_decay;
    EitLength::Finite(a / kappa_p * (lasers.omega_c.powi(2) / (2.0 * atoms.gamma_cp * a) + 1.0))
}

/// Window of samples where the probe at this slice lives: centroid ± 3 rms
/// widths of `|Ω_p|²`.
fn probe_support(slice: &Slice, tau: &[f64], dtau: f64) -> Option<(f64, f64)> {
    let mean = probe_centroid(slice, tau, dtau).ok()?;
    let width = probe_rms_width(slice, tau, dtau).ok()?;
    Some((mean - 3.0 * width, mean + 3.0 * width))
}

fn coupling_depth(result: &PropagationResult, slice: &Slice, range: Option<(f64, f64)>) -> f64 {
    let reference = result.input().fields.omega_c[0].norm_sqr();
    if reference == 0.0 {
        return 0.0;
    }
    slice
        .fields
        .omega_c
        .iter()
        .zip(&result.tau)
        .filter(|(_, &t)| range.is_none_or(|(lo, hi)| t >= lo && t <= hi))
        .fold(0.0, |m, (c, _)| m.max((c.norm_sqr() - reference).abs() / reference))
}

/// Relative coupling-intensity modulation travelling with the probe:
/// `max | |Ω_c(z,τ)|² − Ω_c(0)² | / Ω_c(0)²` over the probe's support at `z`.
pub fn adiabaton_depth(result: &PropagationResult, z: f64) -> Result<f64> {
    let slice = result.slice_at(z)?;
    match probe_support(slice, &result.tau, result.dtau()) {
        Some(range) => Ok(coupling_depth(result, slice, Some(range))),
        None => Ok(0.0),
    }
}

/// Same modulation measure over the whole τ window, including the coupling
/// transient launched at the medium entrance that runs ahead at `c`.
pub fn coupling_modulation(result: &PropagationResult, z: f64) -> Result<f64> {
    let slice = result.slice_at(z)?;
    Ok(coupling_depth(result, slice, None))
}

/// Longitudinal light forces from the probe at `z`,
///
/// ```text
/// F_rp  = ħ k_p Im(Ω_p* ρ_ep)
/// F_dip = ħ (∂_z|Ω_p| / |Ω_p|) Re(Ω_p* ρ_ep)
/// ```
///
/// with `∂_z Ω_p = iκ_p ρ_ep` taken from the propagation equation.
pub fn forces(result: &PropagationResult, z: f64, atoms: &AtomParams) -> Result<ForceTrace> {
    let slice = result.slice_at(z)?;
    let kappa = Complex64::new(0.0, result.kappa_p);
    let k_p = atoms.k_p();
    let (f_rp, f_dip): (Vec<f64>, Vec<f64>) = slice
        .fields
        .omega_p
        .iter()
        .zip(&slice.bloch)
        .map(|(&omega, state)| {
            let polarization = omega.conj() * state.rho_ep;
            let rp = HBAR * k_p * polarization.im;
            let mag_sq = omega.norm_sqr();
            let dip = if mag_sq == 0.0 {
                0.0
            } else {
                let grad = (omega.conj() * kappa * state.rho_ep).re / mag_sq;
                HBAR * grad * polarization.re
            };
            (rp, dip)
        })
        .unzip();
    let dtau = result.dtau();
    Ok(ForceTrace {
        z: slice.z,
        impulse_rp: trapezoid(f_rp.iter().copied(), dtau),
        impulse_dip: trapezoid(f_dip.iter().copied(), dtau),
        f_rp,
        f_dip,
    })
}

/// Population of the noncoupled state, `⟨NC|ρ|NC⟩`.
pub fn nc_projection(state: &BlochState, omega_c: Complex64, omega_p: Complex64) -> Result<f64> {
    let total = omega_c.norm_sqr() + omega_p.norm_sqr();
    if total == 0.0 {
        return Err(Error::DegenerateField("noncoupled state needs Ω > 0"));
    }
    let cross = (omega_p.conj() * omega_c * state.rho_cp).re;
    Ok((omega_p.norm_sqr() * state.rho_cc + omega_c.norm_sqr() * state.rho_pp - 2.0 * cross) / total)
}

/// Ordinary least-squares line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidParameter(
            "linear fit needs at least two matching points".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("linear fit needs distinct x values".into()));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(LinearFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
    })
}

/// Amplitude e-folding length from a fit of `ln E(z)` over the stored
/// slices with `z ≥ z_from`.
pub fn energy_attenuation_length(result: &PropagationResult, z_from: f64) -> Result<f64> {
    let dtau = result.dtau();
    let (z, log_e): (Vec<f64>, Vec<f64>) = result
        .slices
        .iter()
        .filter(|s| s.z >= z_from)
        .map(|s| (s.z, probe_energy(s, dtau).ln()))
        .unzip();
    let fit = linear_fit(&z, &log_e)?;
    Ok(-2.0 / fit.slope)
}

/// E-folding length of the resonant spectral component `|∫Ω_p dτ|`, the
/// part of the pulse that sees the cw absorption coefficient.
pub fn area_attenuation_length(result: &PropagationResult, z_from: f64) -> Result<f64> {
    let dtau = result.dtau();
    let (z, log_a): (Vec<f64>, Vec<f64>) = result
        .slices
        .iter()
        .filter(|s| s.z >= z_from)
        .map(|s| {
            let re = trapezoid(s.fields.omega_p.iter().map(|w| w.re), dtau);
            let im = trapezoid(s.fields.omega_p.iter().map(|w| w.im), dtau);
            (s.z, Complex64::new(re, im).norm().ln())
        })
        .unzip();
    let fit = linear_fit(&z, &log_a)?;
    Ok(-1.0 / fit.slope)
}

/// Largest deviation of `|Ω_p|` from its moment-matched Gaussian, relative
/// to the peak. The amplitude is the least-squares optimum for that shape.
pub fn gaussian_fit_residual(result: &PropagationResult, z: f64) -> Result<f64> {
    let dtau = result.dtau();
    let slice = result.slice_at(z)?;
    let mean = probe_centroid(slice, &result.tau, dtau)?;
    let width = std::f64::consts::SQRT_2 * probe_rms_width(slice, &result.tau, dtau)?;
    let data: Vec<f64> = slice.fields.omega_p.iter().map(|w| w.norm()).collect();
    let shape: Vec<f64> = result
        .tau
        .iter()
        .map(|t| (-0.5 * ((t - mean) / width).powi(2)).exp())
        .collect();
    let num: f64 = data.iter().zip(&shape).map(|(d, g)| d * g).sum();
    let den: f64 = shape.iter().map(|g| g * g).sum();
    let amplitude = num / den;
    let top = data.iter().fold(0.0f64, |m, &d| m.max(d));
    let worst = data
        .iter()
        .zip(&shape)
        .fold(0.0f64, |m, (d, g)| m.max((d - amplitude * g).abs()));
    Ok(worst / top)
}

/// Number of local maxima of `values` that rise above `threshold · max`.
pub fn count_maxima(values: &[f64], threshold: f64) -> usize {
    let top = values.iter().fold(0.0f64, |m, &v| m.max(v));
    let floor = threshold * top;
    let mut count = 0;
    for j in 1..values.len().saturating_sub(1) {
        if values[j] > floor && values[j] >= values[j - 1] && values[j] > values[j + 1] {
            count += 1;
        }
    }
    count
}

/// Sign changes of `values`, ignoring samples below `threshold · max|v|`.
pub fn count_sign_changes(values: &[f64], threshold: f64) -> usize {
    let floor = threshold * max_abs(values);
    let mut last = 0.0f64;
    let mut changes = 0;
    for &v in values.iter().filter(|v| v.abs() > floor) {
        if last != 0.0 && v.signum() != last.signum() {
            changes += 1;
        }
        last = v;
    }
    changes
}
