//! Coupled field–matter propagation in the co-moving frame `τ = t − z/c`.
//!
//! Each spatial slice is a time integration of the Bloch equations over the
//! τ window (RK4 with substeps), driven by the local envelopes. Between
//! slices both envelopes advance through `∂Ω_α/∂z = iκ_α ρ_eα` with a
//! predictor–corrector (Heun) step, so the coupling field is allowed to
//! develop adiabatons.

use num_complex::Complex64;

use crate::atomsys::{gamma_k_unchecked, AtomParams, BlochRates, BlochState, LaserParams, SystemVariant};
use crate::constants::{HBAR, SPEED_OF_LIGHT, VACUUM_PERMITTIVITY};
use crate::error::{Error, Result};

/// Largest tolerated departure of the extended trace from one.
pub const TRACE_TOLERANCE: f64 = 1e-6;
/// Field growth, relative to the strongest input field, treated as blow-up.
pub const BLOWUP_FACTOR: f64 = 1e3;
/// `h · (fastest rate)` per RK4 substep.
const RK4_STEP_BUDGET: f64 = 0.5;
/// Minimum samples per pulse width and steps per Beer length.
pub const MIN_SAMPLES_PER_WIDTH: f64 = 16.0;
pub const MIN_STEPS_PER_BEER_LENGTH: f64 = 4.0;
/// Margin on the analytic delay used to size the τ window.
pub const DELAY_SAFETY: f64 = 1.5;
/// Half-widths of the τ window around the input and the delayed pulse, in
/// units of `T`.
pub const WINDOW_LEAD: f64 = 4.0;

/// Propagation constant `κ = ω N D² / (c ε₀ ħ)` (1/(m·s)).
pub fn propagation_constant(omega: f64, density: f64, dipole: f64) -> f64 {
    omega * density * dipole * dipole / (SPEED_OF_LIGHT * VACUUM_PERMITTIVITY * HBAR)
}

/// Medium constants for the two transitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Medium {
    pub kappa_c: f64,
    pub kappa_p: f64,
}

impl Medium {
    pub fn new(atoms: &AtomParams, density: f64) -> Self {
        Medium {
            kappa_c: propagation_constant(atoms.omega_transition_c(), density, atoms.dipole_c),
            kappa_p: propagation_constant(atoms.omega_transition_p(), density, atoms.dipole_p),
        }
    }

    /// Beer absorption length `ζ_p = A / κ_p` (infinite in vacuum).
    pub fn beer_length(&self, atoms: &AtomParams) -> f64 {
        atoms.total_decay / self.kappa_p
    }
}

/// Weak-probe steady-state response `ρ_ep / Ω_p` with all population in
/// `|p⟩`, for a probe detuned by an extra `offset` from `δ_p`:
/// `χ = (i/2) g / (a g + |Ω_c|²/4)` with `a = A/2 − iδ_p`, `g = γ_cp + iδ_R`.
pub fn probe_susceptibility(atoms: &AtomParams, lasers: &LaserParams, offset: f64) -> Complex64 {
    let (a, g, x) = response_terms(atoms, lasers, offset);
    0.5 * Complex64::i() * g / (a * g + x)
}

/// Analytic weak-probe group delay per unit length, `κ_p · d Re χ / dδ`.
pub fn weak_probe_delay_per_length(atoms: &AtomParams, lasers: &LaserParams, kappa_p: f64) -> f64 {
    let (a, g, x) = response_terms(atoms, lasers, 0.0);
    let i = Complex64::i();
    // da/dδ = dg/dδ = −i
    let d_chi = 0.5 * i * (-i * x + i * g * g) / (a * g + x).powi(2);
    kappa_p * d_chi.re
}

fn response_terms(atoms: &AtomParams, lasers: &LaserParams, offset: f64) -> (Complex64, Complex64, f64) {
    let a = Complex64::new(0.5 * atoms.total_decay, -(lasers.delta_p + offset));
    let g = Complex64::new(atoms.gamma_cp, lasers.delta_raman() - offset);
    let x = 0.25 * lasers.omega_c * lasers.omega_c;
    (a, g, x)
}

/// Co-moving time window and spatial discretisation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub tau_min: f64,
    pub tau_max: f64,
    pub n_tau: usize,
    pub z_max: f64,
    pub n_z: usize,
}

impl Grid {
    /// Window `[−4T, 4T + 1.5 τ_est]`, with `τ_est` the weak-probe delay at
    /// `z_max`.
    pub fn sized_for(
        atoms: &AtomParams,
        lasers: &LaserParams,
        z_max: f64,
        n_z: usize,
        n_tau: usize,
    ) -> Grid {
        let medium = Medium::new(atoms, lasers.density);
        let delay = estimated_delay(atoms, lasers, &medium, z_max);
        Grid {
            tau_min: -WINDOW_LEAD * lasers.pulse_width,
            tau_max: WINDOW_LEAD * lasers.pulse_width + DELAY_SAFETY * delay,
            n_tau,
            z_max,
            n_z,
        }
    }

    pub fn dtau(&self) -> f64 {
        (self.tau_max - self.tau_min) / (self.n_tau - 1) as f64
    }

    pub fn dz(&self) -> f64 {
        self.z_max / self.n_z as f64
    }

    pub fn taus(&self) -> Vec<f64> {
        let h = self.dtau();
        (0..self.n_tau).map(|j| self.tau_min + j as f64 * h).collect()
    }

    pub fn validate(&self, atoms: &AtomParams, lasers: &LaserParams) -> Result<()> {
        let t = lasers.pulse_width;
        if self.n_tau < 2 || self.n_z < 1 {
            return Err(Error::Validation("grid needs n_tau >= 2 and n_z >= 1".into()));
        }
        if !(self.z_max >= 0.0 && self.z_max.is_finite()) {
            return Err(Error::Validation(format!("z_max must be finite and >= 0, got {}", self.z_max)));
        }
        if self.tau_min >= -3.0 * t {
            return Err(Error::Validation(format!(
                "tau_min = {:e} s must lie before -3T = {:e} s",
                self.tau_min,
                -3.0 * t
            )));
        }
        let medium = Medium::new(atoms, lasers.density);
        let needed = 3.0 * t + DELAY_SAFETY * estimated_delay(atoms, lasers, &medium, self.z_max);
        if self.tau_max <= needed {
            return Err(Error::Validation(format!(
                "tau_max = {:e} s must exceed 3T + 1.5 x delay estimate = {:e} s",
                self.tau_max, needed
            )));
        }
        let per_width = t / self.dtau();
        if per_width < MIN_SAMPLES_PER_WIDTH {
            return Err(Error::Validation(format!(
                "n_tau = {} gives {per_width:.1} samples per pulse width; need >= {MIN_SAMPLES_PER_WIDTH} (n_tau >= {})",
                self.n_tau,
                ((self.tau_max - self.tau_min) / t * MIN_SAMPLES_PER_WIDTH).ceil() as usize + 1
            )));
        }
        if lasers.density > 0.0 && self.z_max > 0.0 {
            let zeta = medium.beer_length(atoms);
            let per_beer = zeta / self.dz();
            if per_beer < MIN_STEPS_PER_BEER_LENGTH {
                return Err(Error::Validation(format!(
                    "n_z = {} gives {per_beer:.2} steps per Beer length; need >= {MIN_STEPS_PER_BEER_LENGTH} (n_z >= {})",
                    self.n_z,
                    (self.z_max / zeta * MIN_STEPS_PER_BEER_LENGTH).ceil() as usize
                )));
            }
        }
        Ok(())
    }
}

fn estimated_delay(atoms: &AtomParams, lasers: &LaserParams, medium: &Medium, z: f64) -> f64 {
    if lasers.density == 0.0 || z == 0.0 {
        return 0.0;
    }
    let per_length = weak_probe_delay_per_length(atoms, lasers, medium.kappa_p);
    if per_length.is_finite() {
        (per_length * z).max(0.0)
    } else {
        0.0
    }
}

/// Coupling and probe Rabi-frequency envelopes over the τ grid at one `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldEnvelope {
    pub omega_c: Vec<Complex64>,
    pub omega_p: Vec<Complex64>,
}

impl FieldEnvelope {
    /// Constant coupling and the Gaussian probe entering the medium.
    pub fn input(lasers: &LaserParams, tau: &[f64]) -> Self {
        FieldEnvelope {
            omega_c: vec![Complex64::new(lasers.omega_c, 0.0); tau.len()],
            omega_p: tau.iter().map(|&t| Complex64::new(lasers.input_probe(t), 0.0)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.omega_p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega_p.is_empty()
    }

    fn peak(&self) -> f64 {
        self.omega_c
            .iter()
            .chain(&self.omega_p)
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    fn is_finite(&self) -> bool {
        self.omega_c
            .iter()
            .chain(&self.omega_p)
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Everything needed for one propagation run.
#[derive(Debug, Clone, PartialEq)]
pub struct PropagationSetup {
    pub atoms: AtomParams,
    pub lasers: LaserParams,
    pub grid: Grid,
    pub variant: SystemVariant,
    pub momentum_mode: bool,
    /// Depths (m) at which fields and density matrices are kept. The input
    /// (`z = 0`) and exit (`z_max`) slices are always kept.
    pub slices: Vec<f64>,
}

impl PropagationSetup {
    /// `count` evenly spaced slices over `[0, z_max]`.
    pub fn even_slices(z_max: f64, count: usize) -> Vec<f64> {
        let count = count.max(2);
        (0..count).map(|j| z_max * j as f64 / (count - 1) as f64).collect()
    }
}

/// Density-matrix trajectory of one slice plus integrator bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceSolution {
    pub states: Vec<BlochState>,
    pub rk4_steps: usize,
    pub max_trace_drift: f64,
}

/// Fields and atomic response at one stored depth.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    pub z: f64,
    pub fields: FieldEnvelope,
    pub bloch: Vec<BlochState>,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolverStats {
    pub z_steps: usize,
    pub rk4_steps: usize,
    pub max_trace_drift: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropagationResult {
    pub setup: PropagationSetup,
    pub tau: Vec<f64>,
    /// Stored slices, strictly increasing in `z`.
    pub slices: Vec<Slice>,
    pub kappa_c: f64,
    pub kappa_p: f64,
    pub zeta_p: f64,
    pub stats: SolverStats,
}

impl PropagationResult {
    /// Slice stored at `z`, to within half a spatial step.
    pub fn slice_at(&self, z: f64) -> Result<&Slice> {
        // Requested depths are stored at the nearest z step.
        let tol = 0.5 * self.setup.grid.dz() * (1.0 + 1e-9) + f64::MIN_POSITIVE;
        self.slices
            .iter()
            .min_by(|a, b| (a.z - z).abs().total_cmp(&(b.z - z).abs()))
            .filter(|s| (s.z - z).abs() <= tol)
            .ok_or(Error::MissingSlice { z })
    }

    pub fn input(&self) -> &Slice {
        &self.slices[0]
    }

    pub fn output(&self) -> &Slice {
        self.slices.last().expect("input slice is always stored")
    }

    pub fn dtau(&self) -> f64 {
        self.setup.grid.dtau()
    }
}

/// Integrates the Bloch equations across the τ grid at fixed `z`.
///
/// Fields are linearly interpolated between samples; each sample interval is
/// split into enough RK4 substeps to keep `h` below half the inverse of the
/// fastest rate in the problem. With `momentum_mode`, the ground coherence is
/// additionally damped by the local kinetic decoherence rate.
pub fn integrate_slice(
    initial: &BlochState,
    tau: &[f64],
    fields: &FieldEnvelope,
    atoms: &AtomParams,
    lasers: &LaserParams,
    variant: SystemVariant,
    momentum_mode: bool,
) -> Result<SliceSolution> {
    let rates = BlochRates::new(atoms, lasers, variant);
    let kinetic = if momentum_mode {
        HBAR * atoms.momentum_transfer_sq() / (2.0 * atoms.mass)
    } else {
        0.0
    };
    integrate_with_rates(initial, tau, fields, &rates, kinetic)
}

fn integrate_with_rates(
    initial: &BlochState,
    tau: &[f64],
    fields: &FieldEnvelope,
    rates: &BlochRates,
    kinetic_prefactor: f64,
) -> Result<SliceSolution> {
    let n = tau.len();
    if fields.omega_c.len() != n || fields.omega_p.len() != n {
        return Err(Error::InvalidParameter(format!(
            "field envelope has {} / {} samples, grid has {n}",
            fields.omega_c.len(),
            fields.omega_p.len()
        )));
    }
    if !fields.is_finite() || !initial.is_finite() {
        return Err(Error::NonFinite("slice input"));
    }
    let mut states = Vec::with_capacity(n);
    states.push(*initial);
    if n < 2 {
        return Ok(SliceSolution {
            states,
            rk4_steps: 0,
            max_trace_drift: (initial.trace() - 1.0).abs(),
        });
    }

    let dtau = tau[1] - tau[0];
    let fastest = 2.0 * rates.optical_decay
        + rates.excited_decay
        + rates.ground_decay
        + kinetic_prefactor
        + rates.delta_c.abs()
        + rates.delta_p.abs()
        + fields.peak();
    let substeps = ((dtau * fastest / RK4_STEP_BUDGET).ceil() as usize).max(1);
    let h = dtau / substeps as f64;

    let deriv = |s: &BlochState, oc: Complex64, op: Complex64| {
        let extra = gamma_k_unchecked(op.norm_sqr(), oc.norm_sqr(), kinetic_prefactor);
        rates.derivative(s, oc, op, extra)
    };

    let mut state = *initial;
    let mut max_drift = (state.trace() - 1.0).abs();
    for j in 0..n - 1 {
        let (c0, c1) = (fields.omega_c[j], fields.omega_c[j + 1]);
        let (p0, p1) = (fields.omega_p[j], fields.omega_p[j + 1]);
        let at = |frac: f64| (c0 + (c1 - c0) * frac, p0 + (p1 - p0) * frac);
        for k in 0..substeps {
            let f0 = k as f64 / substeps as f64;
            let fh = (k as f64 + 0.5) / substeps as f64;
            let f1 = (k + 1) as f64 / substeps as f64;
            let (oc0, op0) = at(f0);
            let (och, oph) = at(fh);
            let (oc1, op1) = at(f1);
            let k1 = deriv(&state, oc0, op0);
            let k2 = deriv(&(state + k1 * (0.5 * h)), och, oph);
            let k3 = deriv(&(state + k2 * (0.5 * h)), och, oph);
            let k4 = deriv(&(state + k3 * h), oc1, op1);
            state = state + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        }
        if !state.is_finite() {
            return Err(Error::Integration(format!(
                "density matrix became non-finite at tau = {:e} s",
                tau[j + 1]
            )));
        }
        let drift = (state.trace() - 1.0).abs();
        if drift > TRACE_TOLERANCE {
            return Err(Error::Integration(format!(
                "population trace drifted by {drift:e} at tau = {:e} s",
                tau[j + 1]
            )));
        }
        max_drift = max_drift.max(drift);
        states.push(state);
    }
    Ok(SliceSolution {
        states,
        rk4_steps: (n - 1) * substeps,
        max_trace_drift: max_drift,
    })
}

fn stored_step_indices(setup: &PropagationSetup) -> Result<Vec<usize>> {
    let grid = &setup.grid;
    let dz = grid.dz();
    let mut steps = vec![0, grid.n_z];
    for &z in &setup.slices {
        if !(z.is_finite() && z >= 0.0 && z <= grid.z_max * (1.0 + 1e-12)) {
            return Err(Error::Validation(format!(
                "output slice z = {z} m lies outside [0, z_max = {}]",
                grid.z_max
            )));
        }
        let step = if dz > 0.0 { (z / dz).round() as usize } else { 0 };
        steps.push(step.min(grid.n_z));
    }
    steps.sort_unstable();
    steps.dedup();
    Ok(steps)
}

/// Marches the probe and coupling envelopes from `z = 0` to `z_max`.
pub fn propagate(setup: &PropagationSetup) -> Result<PropagationResult> {
    let PropagationSetup {
        atoms,
        lasers,
        grid,
        variant,
        momentum_mode,
        ..
    } = setup;
    atoms.validate()?;
    lasers.validate()?;
    grid.validate(atoms, lasers)?;
    let keep = stored_step_indices(setup)?;

    let medium = Medium::new(atoms, lasers.density);
    let tau = grid.taus();
    let dz = grid.dz();
    let rates = BlochRates::new(atoms, lasers, *variant);
    let kinetic = if *momentum_mode {
        HBAR * atoms.momentum_transfer_sq() / (2.0 * atoms.mass)
    } else {
        0.0
    };
    let initial = BlochState::ground_p();
    let source_c = Complex64::new(0.0, medium.kappa_c);
    let source_p = Complex64::new(0.0, medium.kappa_p);
    let sources = |states: &[BlochState]| -> (Vec<Complex64>, Vec<Complex64>) {
        states
            .iter()
            .map(|s| (source_c * s.rho_ec, source_p * s.rho_ep))
            .unzip()
    };

    let mut fields = FieldEnvelope::input(lasers, &tau);
    let limit = BLOWUP_FACTOR * fields.peak();
    let mut stats = SolverStats::default();
    let mut solution = integrate_with_rates(&initial, &tau, &fields, &rates, kinetic)?;
    stats.rk4_steps += solution.rk4_steps;
    stats.max_trace_drift = solution.max_trace_drift;

    let mut slices = Vec::with_capacity(keep.len());
    let mut next_keep = keep.iter().peekable();
    if next_keep.peek() == Some(&&0) {
        next_keep.next();
        slices.push(Slice {
            z: 0.0,
            fields: fields.clone(),
            bloch: solution.states.clone(),
        });
    }

    for step in 1..=grid.n_z {
        let (sc, sp) = sources(&solution.states);
        let predicted = FieldEnvelope {
            omega_c: fields.omega_c.iter().zip(&sc).map(|(f, s)| f + s * dz).collect(),
            omega_p: fields.omega_p.iter().zip(&sp).map(|(f, s)| f + s * dz).collect(),
        };
        let trial = integrate_with_rates(&initial, &tau, &predicted, &rates, kinetic)?;
        let (tc, tp) = sources(&trial.states);
        let half = 0.5 * dz;
        for j in 0..tau.len() {
            fields.omega_c[j] += (sc[j] + tc[j]) * half;
            fields.omega_p[j] += (sp[j] + tp[j]) * half;
        }
        let peak = fields.peak();
        if !(peak <= limit) {
            return Err(Error::Instability(format!(
                "field magnitude {peak:e} rad/s exceeds {BLOWUP_FACTOR}x the input at z = {:e} m",
                step as f64 * dz
            )));
        }
        solution = integrate_with_rates(&initial, &tau, &fields, &rates, kinetic)?;
        stats.z_steps += 1;
        stats.rk4_steps += trial.rk4_steps + solution.rk4_steps;
        stats.max_trace_drift = stats
            .max_trace_drift
            .max(trial.max_trace_drift)
            .max(solution.max_trace_drift);

        if next_keep.peek() == Some(&&step) {
            next_keep.next();
            slices.push(Slice {
                z: step as f64 * dz,
                fields: fields.clone(),
                bloch: solution.states.clone(),
            });
        }
    }

    Ok(PropagationResult {
        setup: setup.clone(),
        tau,
        slices,
        kappa_c: medium.kappa_c,
        kappa_p: medium.kappa_p,
        zeta_p: medium.beer_length(atoms),
        stats,
    })
}
