//! Impulsive prealignment pulses and the dimensionless kick strength.

use crate::constants::{field_squared_from_intensity, HBAR};
use crate::error::{Error, Result};
use crate::species::MolecularSpecies;
use crate::thermal::ThermalSpec;

/// Polarization axis of the prealignment pulse relative to the deflecting
/// field (z).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KickAxis {
    /// Parallel to the deflecting-field polarization.
    ZParallel,
    /// Perpendicular (x).
    XPerpendicular,
}

impl KickAxis {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "z" | "parallel" => Ok(KickAxis::ZParallel),
            "x" | "perpendicular" => Ok(KickAxis::XPerpendicular),
            other => Err(Error::InvalidSpec(format!(
                "unknown kick axis '{other}' (expected z|x)"
            ))),
        }
    }
}

/// How the kick strength is specified.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Strength {
    /// Dimensionless P directly.
    Dimensionless(f64),
    /// Peak intensity (W/cm²) and intensity FWHM (s) of a Gaussian pulse.
    Pulse {
        peak_intensity_w_cm2: f64,
        fwhm_s: f64,
    },
}

/// An ultrashort nonresonant alignment pulse, treated as a δ-kick.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KickPulse {
    strength: Strength,
    pub polarization: KickAxis,
}

impl KickPulse {
    pub fn from_strength(p: f64, polarization: KickAxis) -> Result<Self> {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "kick strength must be non-negative, got {p}"
            )));
        }
        Ok(Self {
            strength: Strength::Dimensionless(p),
            polarization,
        })
    }

    pub fn from_pulse(
        peak_intensity_w_cm2: f64,
        fwhm_s: f64,
        polarization: KickAxis,
    ) -> Result<Self> {
        if !(peak_intensity_w_cm2 >= 0.0) || !(fwhm_s > 0.0) {
            return Err(Error::InvalidSpec(
                "pulse needs intensity ≥ 0 and FWHM > 0".into(),
            ));
        }
        Ok(Self {
            strength: Strength::Pulse {
                peak_intensity_w_cm2,
                fwhm_s,
            },
            polarization,
        })
    }

    /// Dimensionless kick strength P for a given species.
    pub fn kick_strength(&self, species: &MolecularSpecies) -> f64 {
        match self.strength {
            Strength::Dimensionless(p) => p,
            Strength::Pulse {
                peak_intensity_w_cm2,
                fwhm_s,
            } => kick_strength_from_pulse(species, peak_intensity_w_cm2, fwhm_s),
        }
    }

    /// Reduced classical kick strength P'_s = P·ħ/√(k_B·T·I).
    pub fn reduced_kick_strength(&self, species: &MolecularSpecies, thermal: &ThermalSpec) -> f64 {
        reduced_kick_strength(self.kick_strength(species), species, thermal)
    }
}

/// Kick strength P = (Δα/4ħ)·∫ε²(t)dt for a Gaussian pulse with intensity
/// envelope I(t) = I₀·exp(−4ln2·t²/τ²) and cycle-averaged I = ½ε₀cε².
///
/// Negative Δα yields a negative P (the pulse anti-aligns); callers decide
/// whether to warn.
pub fn kick_strength_from_pulse(
    species: &MolecularSpecies,
    peak_intensity_w_cm2: f64,
    fwhm_s: f64,
) -> f64 {
    let eps2_peak = field_squared_from_intensity(peak_intensity_w_cm2);
    // ∫exp(−4ln2·t²/τ²)dt = τ·√(π/(4ln2))
    let integral = eps2_peak * fwhm_s * (std::f64::consts::PI / (4.0 * 2f64.ln())).sqrt();
    species.alpha_aniso_si() / (4.0 * HBAR) * integral
}

/// Inverse of [`kick_strength_from_pulse`]: the peak intensity that delivers
/// kick strength `p` with the given FWHM.
pub fn intensity_for_kick_strength(species: &MolecularSpecies, p: f64, fwhm_s: f64) -> f64 {
    let unit = kick_strength_from_pulse(species, 1.0, fwhm_s);
    p / unit
}

/// Reduced kick strength P'_s = P·ħ/√(k_B·T·I); numerically equal to
/// √2·P/J_T.
pub fn reduced_kick_strength(p: f64, species: &MolecularSpecies, thermal: &ThermalSpec) -> f64 {
    p * HBAR / thermal.momentum_scale(species)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::species::cs2;

    #[test]
    fn paper_anchor_kick_strengths() {
        let s = cs2();
        let p25 = kick_strength_from_pulse(&s, 2.3e12, 0.5e-12);
        assert!((p25 - 25.0).abs() / 25.0 < 0.10, "P = {p25}");
        let p5 = kick_strength_from_pulse(&s, 4.6e11, 0.5e-12);
        assert!((p5 - 5.0).abs() / 5.0 < 0.10, "P = {p5}");
    }

    #[test]
    fn zero_intensity_zero_kick() {
        let s = cs2();
        assert_eq!(kick_strength_from_pulse(&s, 0.0, 0.5e-12), 0.0);
    }

    #[test]
    fn kick_intensity_round_trip() {
        let s = cs2();
        let p = 17.0;
        let i = intensity_for_kick_strength(&s, p, 0.5e-12);
        let p2 = kick_strength_from_pulse(&s, i, 0.5e-12);
        assert!((p2 - p).abs() / p < 1e-10);
    }

    #[test]
    fn reduced_kick_matches_sqrt2_p_over_jt() {
        // P'_s = P·ħ/√(k_B·T·I) and √2·P/J_T must be the same number:
        // k_B·T = hB̃c·J_T² and hB̃c = ħ²/(2I).
        let s = cs2();
        for (p, jt) in [(25.0, 5.0), (5.0, 0.5), (12.0, 15.0)] {
            let th = ThermalSpec::from_j_thermal(jt).unwrap();
            let direct = reduced_kick_strength(p, &s, &th);
            let via_jt = std::f64::consts::SQRT_2 * p / jt;
            assert!(
                (direct - via_jt).abs() / via_jt < 1e-12,
                "P'_s mismatch: {direct} vs {via_jt}"
            );
        }
    }

    #[test]
    fn alignment_well_depth_checkpoint() {
        // ¼·Δα·E₀² at 3e9 W/cm² ≈ 0.04 meV for CS₂.
        let s = cs2();
        let e2 = field_squared_from_intensity(3.0e9);
        let u_mev = 0.25 * s.alpha_aniso_si() * e2 / crate::constants::ELECTRON_VOLT * 1e3;
        assert!((u_mev - 0.04).abs() / 0.04 < 0.15, "U = {u_mev} meV");
    }
}
