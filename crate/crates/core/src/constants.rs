//! CODATA 2018 constants in SI units.

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const HBAR: f64 = 1.054_571_817e-34;
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;

pub const SODIUM_MASS: f64 = 22.989_769_28 * ATOMIC_MASS_UNIT;
/// Na D2 line wavelength.
pub const SODIUM_D2_WAVELENGTH: f64 = 589.0e-9;
/// Na D2 excited-state decay rate, 2π · 5.9 MHz.
pub const SODIUM_D2_DECAY: f64 = 2.0 * std::f64::consts::PI * 5.9e6;
