//! Rotational temperature and the dimensionless thermal angular momentum
//! J_T = √(k_B·T/(hB̃c)).

use crate::constants::BOLTZMANN;
use crate::error::{Error, Result};
use crate::species::MolecularSpecies;

/// Rotational temperature given either as T (K) or as J_T; the other is
/// derived against a species.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalSpec {
    temperature_k: Option<f64>,
    j_thermal: Option<f64>,
}

impl ThermalSpec {
    pub fn from_temperature(t_k: f64) -> Result<Self> {
        if !(t_k > 0.0) || !t_k.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "temperature must be positive and finite, got {t_k}"
            )));
        }
        Ok(Self {
            temperature_k: Some(t_k),
            j_thermal: None,
        })
    }

    pub fn from_j_thermal(j_t: f64) -> Result<Self> {
        if !(j_t > 0.0) || !j_t.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "J_T must be positive and finite, got {j_t}"
            )));
        }
        Ok(Self {
            temperature_k: None,
            j_thermal: Some(j_t),
        })
    }

    /// Temperature in kelvin.
    pub fn temperature_k(&self, species: &MolecularSpecies) -> f64 {
        match (self.temperature_k, self.j_thermal) {
            (Some(t), _) => t,
            (None, Some(j_t)) => j_t * j_t * species.rotational_energy_quantum() / BOLTZMANN,
            (None, None) => unreachable!("ThermalSpec constructors set one field"),
        }
    }

    /// Dimensionless thermal angular momentum J_T = √(k_B·T/(hB̃c)).
    pub fn j_thermal(&self, species: &MolecularSpecies) -> f64 {
        match (self.j_thermal, self.temperature_k) {
            (Some(j_t), _) => j_t,
            (None, Some(t)) => (BOLTZMANN * t / species.rotational_energy_quantum()).sqrt(),
            (None, None) => unreachable!("ThermalSpec constructors set one field"),
        }
    }

    /// Thermal energy k_B·T (J).
    pub fn thermal_energy(&self, species: &MolecularSpecies) -> f64 {
        BOLTZMANN * self.temperature_k(species)
    }

    /// Thermal momentum scale p_th = √(I·k_B·T) (kg·m²/s).
    pub fn momentum_scale(&self, species: &MolecularSpecies) -> f64 {
        (species.moment_of_inertia() * self.thermal_energy(species)).sqrt()
    }

    /// Thermal angular frequency ω_th = √(k_B·T/I) (s⁻¹); reduced time is
    /// t' = ω_th·t.
    pub fn omega_thermal(&self, species: &MolecularSpecies) -> f64 {
        (self.thermal_energy(species) / species.moment_of_inertia()).sqrt()
    }
}
