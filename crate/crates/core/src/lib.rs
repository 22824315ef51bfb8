//! Slow-light propagation of a probe pulse through a cold sample of open
//! three-level Λ atoms.
//!
//! - [`atomsys`]: atomic and laser parameters, open-system Bloch equations.
//! - [`maxwell_bloch`]: space–time marching of the coupled envelopes.
//! - [`diagnostics`]: delay, group velocity, transmission, windows, forces.
//! - [`scenarios`]: configuration files, presets, sweeps and CSV output.

pub mod atomsys;
pub mod constants;
pub mod diagnostics;
pub mod error;
pub mod maxwell_bloch;
pub mod scenarios;

pub use atomsys::{AtomParams, BlochState, Geometry, LaserParams, SystemVariant};
pub use error::{Error, Result};
pub use maxwell_bloch::{propagate, FieldEnvelope, Grid, PropagationResult, PropagationSetup};
