//! Physical constants used by the conduction and timing estimators.
//!
//! All values are CODATA 2018, in SI units. The same numbers are embedded
//! verbatim in every model card this crate writes so downstream consumers
//! can see exactly which constants a result was computed with.

/// Elementary charge, C.
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;

/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Vacuum permittivity, F/m.
pub const VACUUM_PERMITTIVITY: f64 = 8.8541878128e-12;

/// Free-electron Richardson constant, A m^-2 K^-2 (120 A cm^-2 K^-2).
///
/// Effective-mass corrections are applied through the `a_eff` parameter of
/// the thermionic-emission record, expressed as `RICHARDSON_BASE * m*/m0`.
pub const RICHARDSON_BASE: f64 = 1.2e6;
