//! Physical constants (SI, CODATA 2018).
//!
//! All internal computations run in SI units; polarizability volumes (Å³)
//! and rotational constants (cm⁻¹) are converted at the boundary.

/// Planck constant h (J·s)
pub const PLANCK: f64 = 6.626_070_15e-34;

/// Reduced Planck constant ħ = h/2π (J·s); kept exactly h/2π so identities
/// like hB̃c = ħ²/(2I) hold to rounding.
pub const HBAR: f64 = PLANCK / (2.0 * std::f64::consts::PI);

/// Speed of light in vacuum (m/s)
pub const SPEED_OF_LIGHT: f64 = 2.997_924_58e8;

/// Boltzmann constant (J/K)
pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Vacuum permittivity ε₀ (F/m)
pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_8128e-12;

/// Atomic mass unit (kg)
pub const ATOMIC_MASS: f64 = 1.660_539_066_60e-27;

/// Electron volt (J)
pub const ELECTRON_VOLT: f64 = 1.602_176_634e-19;

/// Converts a polarizability volume in Å³ to an SI polarizability in C·m²/V.
///
/// The interaction potential −¼αE² uses the Gaussian-unit convention where
/// α is a volume; in SI the same potential needs α' = 4πε₀·α_vol.
pub fn polarizability_si_from_volume(alpha_a3: f64) -> f64 {
    4.0 * std::f64::consts::PI * VACUUM_PERMITTIVITY * (alpha_a3 * 1e-30)
}

/// Converts a cycle-averaged intensity (W/cm²) to the squared field
/// amplitude E₀² (V²/m²) via I = ½ε₀cE₀².
pub fn field_squared_from_intensity(intensity_w_cm2: f64) -> f64 {
    2.0 * (intensity_w_cm2 * 1e4) / (VACUUM_PERMITTIVITY * SPEED_OF_LIGHT)
}

/// Inverse of [`field_squared_from_intensity`].
pub fn intensity_from_field_squared(e_squared: f64) -> f64 {
    0.5 * VACUUM_PERMITTIVITY * SPEED_OF_LIGHT * e_squared * 1e-4
}
