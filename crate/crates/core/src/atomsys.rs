//! Open three-level Λ atoms: parameter types and the optical Bloch equations.
//!
//! Levels are the two ground states `|p⟩` (probe) and `|c⟩` (coupling), the
//! common excited state `|e⟩`, and a sink `|out⟩` that collects population
//! lost from the Λ system. The equations are written in the rotating frame
//! with the Hamiltonian (ħ = 1)
//!
//! ```text
//! H = −δ_p |e⟩⟨e| + δ_R |c⟩⟨c| − ½ (Ω_p |e⟩⟨p| + Ω_c |e⟩⟨c| + h.c.)
//! ```
//!
//! so that `|NC⟩ = (Ω_p |c⟩ − Ω_c |p⟩) / Ω` is an exact zero-energy eigenstate
//! at two-photon resonance. Coherences are stored as `ρ_ij = ⟨i|ρ|j⟩`.

use std::f64::consts::PI;
use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::constants::{
    HBAR, SODIUM_D2_DECAY, SODIUM_D2_WAVELENGTH, SODIUM_MASS, SPEED_OF_LIGHT, VACUUM_PERMITTIVITY,
};
use crate::error::{ensure_finite, Error, Result};

/// Relative orientation of the coupling and probe wavevectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Copropagating,
    Counterpropagating,
    Orthogonal,
}

impl Geometry {
    pub fn name(self) -> &'static str {
        match self {
            Geometry::Copropagating => "copropagating",
            Geometry::Counterpropagating => "counterpropagating",
            Geometry::Orthogonal => "orthogonal",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "copropagating" => Some(Geometry::Copropagating),
            "counterpropagating" => Some(Geometry::Counterpropagating),
            "orthogonal" => Some(Geometry::Orthogonal),
            _ => None,
        }
    }
}

/// Open system, or the closed system obtained by repumping the sink.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SystemVariant {
    #[default]
    Open,
    ClosedRepumped,
}

impl SystemVariant {
    pub fn name(self) -> &'static str {
        match self {
            SystemVariant::Open => "open",
            SystemVariant::ClosedRepumped => "closed_repumped",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "open" => Some(SystemVariant::Open),
            "closed_repumped" | "closed" => Some(SystemVariant::ClosedRepumped),
            _ => None,
        }
    }
}

/// Atomic constants of the Λ system. All rates are angular frequencies (rad/s).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomParams {
    /// Total excited-state decay rate `A = Γ_c + Γ_p + Γ_out`.
    pub total_decay: f64,
    pub gamma_c: f64,
    pub gamma_p: f64,
    pub gamma_out: f64,
    /// Ground-state coherence decay rate.
    pub gamma_cp: f64,
    /// Atomic mass (kg).
    pub mass: f64,
    pub lambda_c: f64,
    pub lambda_p: f64,
    /// Dipole moments `D_ec`, `D_ep` (C·m).
    pub dipole_c: f64,
    pub dipole_p: f64,
    pub geometry: Geometry,
}

impl AtomParams {
    /// Builds the parameter set with dipole moments derived from the branch
    /// decay rates, and validates it.
    pub fn from_rates(
        total_decay: f64,
        gamma_c: f64,
        gamma_p: f64,
        gamma_out: f64,
        gamma_cp: f64,
        mass: f64,
        lambda_c: f64,
        lambda_p: f64,
        geometry: Geometry,
    ) -> Result<Self> {
        if !(lambda_c > 0.0 && lambda_p > 0.0) {
            return Err(Error::InvalidParameter(
                "wavelengths must be positive".into(),
            ));
        }
        let dipole = |rate: f64, lambda: f64| {
            if rate > 0.0 {
                dipole_from_decay(rate, transition_frequency(lambda))
            } else {
                Ok(0.0)
            }
        };
        let atoms = AtomParams {
            total_decay,
            gamma_c,
            gamma_p,
            gamma_out,
            gamma_cp,
            mass,
            lambda_c,
            lambda_p,
            dipole_c: dipole(gamma_c, lambda_c)?,
            dipole_p: dipole(gamma_p, lambda_p)?,
            geometry,
        };
        atoms.validate()?;
        Ok(atoms)
    }

    /// Na D2 line with `Γ_c = A/3`, `Γ_p = A/2`, `Γ_out = A/6`, no ground
    /// decoherence and orthogonal beams.
    pub fn sodium_d2() -> Self {
        let a = SODIUM_D2_DECAY;
        AtomParams::from_rates(
            a,
            a / 3.0,
            a / 2.0,
            a / 6.0,
            0.0,
            SODIUM_MASS,
            SODIUM_D2_WAVELENGTH,
            SODIUM_D2_WAVELENGTH,
            Geometry::Orthogonal,
        )
        .expect("sodium constants are valid")
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            (self.total_decay, "total decay A"),
            (self.gamma_c, "gamma_c"),
            (self.gamma_p, "gamma_p"),
            (self.gamma_out, "gamma_out"),
            (self.gamma_cp, "gamma_cp"),
            (self.mass, "mass"),
            (self.lambda_c, "lambda_c"),
            (self.lambda_p, "lambda_p"),
            (self.dipole_c, "dipole_c"),
            (self.dipole_p, "dipole_p"),
        ];
        for (value, name) in fields {
            ensure_finite(value, name).map_err(|_| {
                Error::InvalidParameter(format!("{name} must be finite"))
            })?;
            if value < 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be non-negative, got {value}"
                )));
            }
        }
        if self.total_decay <= 0.0 {
            return Err(Error::InvalidParameter("total decay A must be positive".into()));
        }
        if self.mass <= 0.0 || self.lambda_c <= 0.0 || self.lambda_p <= 0.0 {
            return Err(Error::InvalidParameter(
                "mass and wavelengths must be positive".into(),
            ));
        }
        let sum = self.gamma_c + self.gamma_p + self.gamma_out;
        if (sum - self.total_decay).abs() > 1e-12 * self.total_decay {
            return Err(Error::InvalidParameter(format!(
                "branch rates must add up to A: gamma_c + gamma_p + gamma_out = {sum}, A = {}",
                self.total_decay
            )));
        }
        Ok(())
    }

    pub fn k_c(&self) -> f64 {
        2.0 * PI / self.lambda_c
    }

    pub fn k_p(&self) -> f64 {
        2.0 * PI / self.lambda_p
    }

    pub fn omega_transition_c(&self) -> f64 {
        transition_frequency(self.lambda_c)
    }

    pub fn omega_transition_p(&self) -> f64 {
        transition_frequency(self.lambda_p)
    }

    /// `|k_c − k_p|²` for the configured beam geometry.
    pub fn momentum_transfer_sq(&self) -> f64 {
        let (kc, kp) = (self.k_c(), self.k_p());
        match self.geometry {
            Geometry::Copropagating => (kc - kp).powi(2),
            Geometry::Counterpropagating => (kc + kp).powi(2),
            Geometry::Orthogonal => kc * kc + kp * kp,
        }
    }

    /// Recoil frequency `ħk_p²/2M` of the probe transition.
    pub fn recoil_frequency(&self) -> f64 {
        HBAR * self.k_p().powi(2) / (2.0 * self.mass)
    }
}

/// Laser configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserParams {
    /// Constant coupling Rabi frequency `Ω_c` (rad/s).
    pub omega_c: f64,
    /// Probe peak Rabi frequency `Ω_op` (rad/s).
    pub omega_p_peak: f64,
    /// Gaussian width `T` (s).
    pub pulse_width: f64,
    pub delta_c: f64,
    pub delta_p: f64,
    /// Atomic density (m⁻³).
    pub density: f64,
}

impl LaserParams {
    pub fn delta_raman(&self) -> f64 {
        self.delta_c - self.delta_p
    }

    /// Probe envelope entering the medium, `Ω_op exp(−τ²/2T²)`.
    pub fn input_probe(&self, tau: f64) -> f64 {
        self.omega_p_peak * (-0.5 * (tau / self.pulse_width).powi(2)).exp()
    }

    /// Checks the laser invariants. `Ω_c = 0` is accepted (two-level
    /// absorption runs); the EIT regime needs it positive.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            (self.omega_c, "omega_c"),
            (self.omega_p_peak, "omega_p_peak"),
            (self.pulse_width, "pulse_width"),
            (self.delta_c, "delta_c"),
            (self.delta_p, "delta_p"),
            (self.density, "density"),
        ];
        for (value, name) in fields {
            if !value.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        if self.pulse_width <= 0.0 {
            return Err(Error::InvalidParameter("pulse_width must be positive".into()));
        }
        if self.density < 0.0 {
            return Err(Error::InvalidParameter("density must be non-negative".into()));
        }
        if self.omega_p_peak < 0.0 || self.omega_c < 0.0 {
            return Err(Error::InvalidParameter(
                "Rabi frequencies must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

/// Density matrix of the open Λ system: four populations and the three
/// independent rotating-frame coherences. The same layout holds time
/// derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BlochState {
    pub rho_pp: f64,
    pub rho_cc: f64,
    pub rho_ee: f64,
    pub rho_out: f64,
    pub rho_ep: Complex64,
    pub rho_ec: Complex64,
    pub rho_cp: Complex64,
}

impl BlochState {
    /// All population in `|p⟩`.
    pub fn ground_p() -> Self {
        BlochState {
            rho_pp: 1.0,
            ..Default::default()
        }
    }

    /// Projector onto the noncoupled state for the given fields.
    pub fn noncoupled(omega_c: Complex64, omega_p: Complex64) -> Result<Self> {
        let total = omega_c.norm_sqr() + omega_p.norm_sqr();
        if total == 0.0 {
            return Err(Error::DegenerateField("noncoupled state needs a nonzero field"));
        }
        Ok(BlochState {
            rho_pp: omega_c.norm_sqr() / total,
            rho_cc: omega_p.norm_sqr() / total,
            rho_cp: -omega_p * omega_c.conj() / total,
            ..Default::default()
        })
    }

    /// Sum of the four populations (the extended trace).
    pub fn trace(&self) -> f64 {
        self.rho_pp + self.rho_cc + self.rho_ee + self.rho_out
    }

    pub fn is_finite(&self) -> bool {
        [self.rho_pp, self.rho_cc, self.rho_ee, self.rho_out]
            .iter()
            .all(|x| x.is_finite())
            && [self.rho_ep, self.rho_ec, self.rho_cp]
                .iter()
                .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Population bounds and the Cauchy–Schwarz condition on each coherence.
    pub fn is_physical(&self, tol: f64) -> bool {
        let in_unit = |x: f64| (-tol..=1.0 + tol).contains(&x);
        in_unit(self.rho_pp)
            && in_unit(self.rho_cc)
            && in_unit(self.rho_ee)
            && in_unit(self.rho_out)
            && (self.trace() - 1.0).abs() <= tol
            && self.rho_ep.norm_sqr() <= self.rho_ee * self.rho_pp + tol
            && self.rho_ec.norm_sqr() <= self.rho_ee * self.rho_cc + tol
            && self.rho_cp.norm_sqr() <= self.rho_cc * self.rho_pp + tol
    }
}

impl Add for BlochState {
    type Output = BlochState;

    fn add(self, o: BlochState) -> BlochState {
        BlochState {
            rho_pp: self.rho_pp + o.rho_pp,
            rho_cc: self.rho_cc + o.rho_cc,
            rho_ee: self.rho_ee + o.rho_ee,
            rho_out: self.rho_out + o.rho_out,
            rho_ep: self.rho_ep + o.rho_ep,
            rho_ec: self.rho_ec + o.rho_ec,
            rho_cp: self.rho_cp + o.rho_cp,
        }
    }
}

impl Mul<f64> for BlochState {
    type Output = BlochState;

    fn mul(self, s: f64) -> BlochState {
        BlochState {
            rho_pp: self.rho_pp * s,
            rho_cc: self.rho_cc * s,
            rho_ee: self.rho_ee * s,
            rho_out: self.rho_out * s,
            rho_ep: self.rho_ep * s,
            rho_ec: self.rho_ec * s,
            rho_cp: self.rho_cp * s,
        }
    }
}

/// Relaxation and detuning constants of the Bloch equations, resolved once
/// per integration so the inner loop does no branching on the variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct BlochRates {
    pub excited_decay: f64,
    pub feed_c: f64,
    pub feed_p: f64,
    pub feed_out: f64,
    pub optical_decay: f64,
    pub ground_decay: f64,
    pub delta_c: f64,
    pub delta_p: f64,
    pub delta_raman: f64,
}

impl BlochRates {
    pub fn new(atoms: &AtomParams, lasers: &LaserParams, variant: SystemVariant) -> Self {
        let (excited_decay, feed_out) = match variant {
            SystemVariant::Open => (atoms.total_decay, atoms.gamma_out),
            SystemVariant::ClosedRepumped => (atoms.gamma_c + atoms.gamma_p, 0.0),
        };
        BlochRates {
            excited_decay,
            feed_c: atoms.gamma_c,
            feed_p: atoms.gamma_p,
            feed_out,
            optical_decay: 0.5 * atoms.total_decay,
            ground_decay: atoms.gamma_cp,
            delta_c: lasers.delta_c,
            delta_p: lasers.delta_p,
            delta_raman: lasers.delta_raman(),
        }
    }

    /// Rotating-frame time derivative. `extra_ground_decay` is added to the
    /// ground-coherence damping (the kinetic decoherence in momentum mode).
    #[inline]
    pub fn derivative(
        &self,
        s: &BlochState,
        omega_c: Complex64,
        omega_p: Complex64,
        extra_ground_decay: f64,
    ) -> BlochState {
        let i = Complex64::i();
        let half_i = 0.5 * i;
        let rho_ce = s.rho_ec.conj();
        let rho_pc = s.rho_cp.conj();

        // Im(Ω* ρ_e·) is the coherent transfer rate from the ground state into |e⟩.
        let pump_p = (omega_p.conj() * s.rho_ep).im;
        let pump_c = (omega_c.conj() * s.rho_ec).im;

        let rho_ee = s.rho_ee;
        let d_ee = -self.excited_decay * rho_ee + pump_p + pump_c;
        let d_pp = self.feed_p * rho_ee - pump_p;
        let d_cc = self.feed_c * rho_ee - pump_c;
        let d_out = self.feed_out * rho_ee;

        let d_ep = Complex64::new(-self.optical_decay, self.delta_p) * s.rho_ep
            + half_i * omega_p * (s.rho_pp - rho_ee)
            + half_i * omega_c * s.rho_cp;
        let d_ec = Complex64::new(-self.optical_decay, self.delta_c) * s.rho_ec
            + half_i * omega_c * (s.rho_cc - rho_ee)
            + half_i * omega_p * rho_pc;
        let d_cp = Complex64::new(-(self.ground_decay + extra_ground_decay), -self.delta_raman)
            * s.rho_cp
            + half_i * (omega_c.conj() * s.rho_ep - omega_p * rho_ce);

        BlochState {
            rho_pp: d_pp,
            rho_cc: d_cc,
            rho_ee: d_ee,
            rho_out: d_out,
            rho_ep: d_ep,
            rho_ec: d_ec,
            rho_cp: d_cp,
        }
    }
}

fn ensure_finite_complex(z: Complex64, what: &'static str) -> Result<()> {
    ensure_finite(z.re, what)?;
    ensure_finite(z.im, what)?;
    Ok(())
}

/// Time derivative of the density matrix under the open-system optical Bloch
/// equations (or their repumped, closed counterpart).
pub fn obe_rhs(
    state: &BlochState,
    omega_c: Complex64,
    omega_p: Complex64,
    atoms: &AtomParams,
    lasers: &LaserParams,
    variant: SystemVariant,
) -> Result<BlochState> {
    if !state.is_finite() {
        return Err(Error::NonFinite("density matrix"));
    }
    ensure_finite_complex(omega_c, "coupling Rabi frequency")?;
    ensure_finite_complex(omega_p, "probe Rabi frequency")?;
    for (v, name) in [
        (atoms.total_decay, "total decay"),
        (atoms.gamma_cp, "gamma_cp"),
        (lasers.delta_c, "delta_c"),
        (lasers.delta_p, "delta_p"),
    ] {
        ensure_finite(v, name)?;
    }
    Ok(BlochRates::new(atoms, lasers, variant).derivative(state, omega_c, omega_p, 0.0))
}

/// Rabi frequency `D·E/ħ` of a field amplitude (V/m) on a dipole (C·m).
pub fn rabi_from_field(field_amplitude: f64, dipole: f64) -> Result<f64> {
    ensure_finite(field_amplitude, "field amplitude")?;
    ensure_finite(dipole, "dipole moment")?;
    if dipole <= 0.0 {
        return Err(Error::InvalidParameter("dipole moment must be positive".into()));
    }
    Ok(dipole * field_amplitude / HBAR)
}

/// Inverse of [`rabi_from_field`].
pub fn field_from_rabi(rabi: f64, dipole: f64) -> Result<f64> {
    ensure_finite(rabi, "Rabi frequency")?;
    ensure_finite(dipole, "dipole moment")?;
    if dipole <= 0.0 {
        return Err(Error::InvalidParameter("dipole moment must be positive".into()));
    }
    Ok(rabi * HBAR / dipole)
}

/// Dipole moment carrying a spontaneous decay rate `partial_rate` on a
/// transition of angular frequency `omega`: `D² = 3π ε₀ ħ c³ Γ / ω³`.
pub fn dipole_from_decay(partial_rate: f64, omega: f64) -> Result<f64> {
    ensure_finite(partial_rate, "decay rate")?;
    ensure_finite(omega, "transition frequency")?;
    if partial_rate <= 0.0 || omega <= 0.0 {
        return Err(Error::InvalidParameter(
            "decay rate and transition frequency must be positive".into(),
        ));
    }
    // Explicit products: `powi` may round differently when constant-folded.
    let c3 = SPEED_OF_LIGHT * SPEED_OF_LIGHT * SPEED_OF_LIGHT;
    let omega3 = omega * omega * omega;
    Ok((3.0 * PI * VACUUM_PERMITTIVITY * HBAR * c3 * partial_rate / omega3).sqrt())
}

/// Angular frequency `2πc/λ`.
pub fn transition_frequency(lambda: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / lambda
}

/// Kinetic decoherence rate of the momentum-dressed noncoupled state,
/// `ħ|k_c − k_p|²/2M · |Ω_p|²/Ω²`. Zero when both fields vanish.
pub fn gamma_k(omega_p: f64, omega_c: f64, atoms: &AtomParams) -> Result<f64> {
    ensure_finite(omega_p, "probe Rabi frequency")?;
    ensure_finite(omega_c, "coupling Rabi frequency")?;
    Ok(gamma_k_unchecked(
        omega_p * omega_p,
        omega_c * omega_c,
        HBAR * atoms.momentum_transfer_sq() / (2.0 * atoms.mass),
    ))
}

#[inline]
pub(crate) fn gamma_k_unchecked(probe_sq: f64, coupling_sq: f64, prefactor: f64) -> f64 {
    let total = probe_sq + coupling_sq;
    if total == 0.0 {
        0.0
    } else {
        prefactor * probe_sq / total
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn lasers() -> LaserParams {
        let a = SODIUM_D2_DECAY;
        LaserParams {
            omega_c: 0.18 * a,
            omega_p_peak: 0.1 * a,
            pulse_width: 80.0 / a,
            delta_c: 0.0,
            delta_p: 0.0,
            density: 3.3e18,
        }
    }

    #[test]
    fn pure_decay_from_excited_state() {
        let atoms = AtomParams::sodium_d2();
        let a = atoms.total_decay;
        let state = BlochState {
            rho_ee: 1.0,
            ..Default::default()
        };
        let zero = Complex64::new(0.0, 0.0);
        let d = obe_rhs(&state, zero, zero, &atoms, &lasers(), SystemVariant::Open).unwrap();
        assert_relative_eq!(d.rho_ee, -a);
        assert_relative_eq!(d.rho_cc, a / 3.0);
        assert_relative_eq!(d.rho_pp, a / 2.0);
        assert_relative_eq!(d.rho_out, a / 6.0);

        let d = obe_rhs(&state, zero, zero, &atoms, &lasers(), SystemVariant::ClosedRepumped)
            .unwrap();
        assert_relative_eq!(d.rho_ee, -5.0 * a / 6.0);
        assert_eq!(d.rho_out, 0.0);
        assert_relative_eq!(d.trace(), 0.0, epsilon = 1e-6);
    }

    #[test]
    fn optical_coherence_decays_at_half_a_in_both_variants() {
        let atoms = AtomParams::sodium_d2();
        let state = BlochState {
            rho_ep: Complex64::new(0.1, 0.0),
            rho_ec: Complex64::new(0.0, 0.1),
            ..Default::default()
        };
        let zero = Complex64::new(0.0, 0.0);
        for variant in [SystemVariant::Open, SystemVariant::ClosedRepumped] {
            let d = obe_rhs(&state, zero, zero, &atoms, &lasers(), variant).unwrap();
            assert_relative_eq!(d.rho_ep.re, -0.05 * atoms.total_decay);
            assert_relative_eq!(d.rho_ec.im, -0.05 * atoms.total_decay);
        }
    }

    #[test]
    fn rejects_non_finite_input() {
        let atoms = AtomParams::sodium_d2();
        let nan = Complex64::new(f64::NAN, 0.0);
        let ok = Complex64::new(1.0, 0.0);
        let s = BlochState::ground_p();
        assert!(matches!(
            obe_rhs(&s, nan, ok, &atoms, &lasers(), SystemVariant::Open),
            Err(Error::NonFinite(_))
        ));
        let mut bad = s;
        bad.rho_cp = Complex64::new(0.0, f64::INFINITY);
        assert!(obe_rhs(&bad, ok, ok, &atoms, &lasers(), SystemVariant::Open).is_err());
    }

    #[test]
    fn rabi_inverse_round_trip() {
        let atoms = AtomParams::sodium_d2();
        let target = 0.18 * atoms.total_decay;
        let e = field_from_rabi(target, atoms.dipole_p).unwrap();
        assert_relative_eq!(rabi_from_field(e, atoms.dipole_p).unwrap(), target, max_relative = 1e-14);
        assert_eq!(rabi_from_field(0.0, atoms.dipole_p).unwrap(), 0.0);
        assert_relative_eq!(
            rabi_from_field(2.0 * e, atoms.dipole_p).unwrap(),
            2.0 * target,
            max_relative = 1e-14
        );
        assert!(rabi_from_field(1.0, 0.0).is_err());
    }

    #[test]
    fn dipole_scaling_laws() {
        let omega = transition_frequency(SODIUM_D2_WAVELENGTH);
        let d = dipole_from_decay(1e7, omega).unwrap();
        assert_relative_eq!(dipole_from_decay(4e7, omega).unwrap(), 2.0 * d, max_relative = 1e-14);
        assert_relative_eq!(
            dipole_from_decay(1e7, 2.0 * omega).unwrap(),
            d / 2f64.powf(1.5),
            max_relative = 1e-14
        );
        assert!(dipole_from_decay(0.0, omega).is_err());
    }

    #[test]
    fn sodium_dipole_matches_golden_value() {
        // 30-digit evaluation of sqrt(3π ε₀ ħ c³ (A/2) / ω³) for λ = 589.0 nm.
        let atoms = AtomParams::sodium_d2();
        assert_relative_eq!(atoms.dipole_p, 1.159_183_233_553_228e-29, max_relative = 1e-12);
        assert_relative_eq!(atoms.dipole_c, 9.464_691_468_649_565e-30, max_relative = 1e-12);
    }

    #[test]
    fn gamma_k_geometry() {
        let mut atoms = AtomParams::sodium_d2();
        let a = atoms.total_decay;
        atoms.geometry = Geometry::Copropagating;
        assert_eq!(gamma_k(0.1 * a, 0.18 * a, &atoms).unwrap(), 0.0);

        atoms.geometry = Geometry::Counterpropagating;
        let counter = gamma_k(0.1 * a, 0.18 * a, &atoms).unwrap();
        atoms.geometry = Geometry::Orthogonal;
        let orth = gamma_k(0.1 * a, 0.18 * a, &atoms).unwrap();
        // (2k)² versus 2k² for equal wavelengths.
        assert_relative_eq!(counter, 2.0 * orth, max_relative = 1e-14);

        assert_eq!(gamma_k(0.0, 0.0, &atoms).unwrap(), 0.0);
        let small = gamma_k(1e-3 * a, 0.18 * a, &atoms).unwrap();
        let smaller = gamma_k(0.5e-3 * a, 0.18 * a, &atoms).unwrap();
        assert_relative_eq!(small / smaller, 4.0, max_relative = 1e-4);
    }

    #[test]
    fn sodium_recoil_frequency() {
        // ħk²/2M with k = 2π/589.0 nm and M = 22.98976928 u, 30-digit evaluation.
        let atoms = AtomParams::sodium_d2();
        assert_relative_eq!(atoms.recoil_frequency(), 157_177.943_427_236, max_relative = 1e-10);
    }

    #[test]
    fn validation_catches_branching_mismatch() {
        let mut atoms = AtomParams::sodium_d2();
        atoms.gamma_out *= 1.01;
        assert!(atoms.validate().is_err());
        let mut atoms = AtomParams::sodium_d2();
        atoms.mass = 0.0;
        assert!(atoms.validate().is_err());
        let mut l = lasers();
        l.pulse_width = 0.0;
        assert!(l.validate().is_err());
        assert_eq!(lasers().delta_raman(), 0.0);
    }

    #[test]
    fn noncoupled_projector_requires_field() {
        let z = Complex64::new(0.0, 0.0);
        assert!(BlochState::noncoupled(z, z).is_err());
        let nc = BlochState::noncoupled(Complex64::new(1.0, 0.0), z).unwrap();
        assert_eq!(nc, BlochState::ground_p());
    }
}
