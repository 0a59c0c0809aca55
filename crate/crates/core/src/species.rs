//! Molecular species data: polarizabilities, rotational constant, mass and
//! nuclear-spin parity restrictions.

use crate::constants::{ATOMIC_MASS, HBAR, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

/// Which rotational quantum numbers J are allowed by nuclear-spin statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JParity {
    All,
    EvenOnly,
    OddOnly,
}

impl JParity {
    pub fn allows(&self, j: u32) -> bool {
        match self {
            JParity::All => true,
            JParity::EvenOnly => j % 2 == 0,
            JParity::OddOnly => j % 2 == 1,
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "all" => Ok(JParity::All),
            "even_only" => Ok(JParity::EvenOnly),
            "odd_only" => Ok(JParity::OddOnly),
            other => Err(Error::InvalidSpecies(format!(
                "unknown j_parity '{other}' (expected all|even_only|odd_only)"
            ))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            JParity::All => "all",
            JParity::EvenOnly => "even_only",
            JParity::OddOnly => "odd_only",
        }
    }
}

/// A linear molecule, described by its polarizability components (volumes in
/// Å³), rotational constant B (cm⁻¹), mass (amu) and spin-statistics parity.
#[derive(Debug, Clone, PartialEq)]
pub struct MolecularSpecies {
    pub name: String,
    pub alpha_parallel_a3: f64,
    pub alpha_perp_a3: f64,
    pub b_cm1: f64,
    pub mass_amu: f64,
    pub j_parity: JParity,
}

impl MolecularSpecies {
    pub fn new(
        name: &str,
        alpha_parallel_a3: f64,
        alpha_perp_a3: f64,
        b_cm1: f64,
        mass_amu: f64,
        j_parity: JParity,
    ) -> Result<Self> {
        let s = Self {
            name: name.to_string(),
            alpha_parallel_a3,
            alpha_perp_a3,
            b_cm1,
            mass_amu,
            j_parity,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_parallel_a3 > 0.0) || !(self.alpha_perp_a3 > 0.0) {
            return Err(Error::InvalidSpecies(format!(
                "{}: polarizability components must be positive",
                self.name
            )));
        }
        if !(self.b_cm1 > 0.0) {
            return Err(Error::InvalidSpecies(format!(
                "{}: rotational constant must be positive",
                self.name
            )));
        }
        if !(self.mass_amu > 0.0) {
            return Err(Error::InvalidSpecies(format!(
                "{}: mass must be positive",
                self.name
            )));
        }
        Ok(())
    }

    /// Orientation-averaged polarizability volume ᾱ = (α∥ + 2α⊥)/3 (Å³).
    pub fn alpha_mean_a3(&self) -> f64 {
        (self.alpha_parallel_a3 + 2.0 * self.alpha_perp_a3) / 3.0
    }

    /// Polarizability anisotropy volume Δα = α∥ − α⊥ (Å³).
    pub fn alpha_aniso_a3(&self) -> f64 {
        self.alpha_parallel_a3 - self.alpha_perp_a3
    }

    /// ᾱ in SI units (C·m²/V).
    pub fn alpha_mean_si(&self) -> f64 {
        crate::constants::polarizability_si_from_volume(self.alpha_mean_a3())
    }

    /// Δα in SI units (C·m²/V).
    pub fn alpha_aniso_si(&self) -> f64 {
        crate::constants::polarizability_si_from_volume(self.alpha_aniso_a3())
    }

    /// α∥ in SI units (C·m²/V).
    pub fn alpha_parallel_si(&self) -> f64 {
        crate::constants::polarizability_si_from_volume(self.alpha_parallel_a3)
    }

    /// α⊥ in SI units (C·m²/V).
    pub fn alpha_perp_si(&self) -> f64 {
        crate::constants::polarizability_si_from_volume(self.alpha_perp_a3)
    }

    /// Rotational constant as a wavenumber in m⁻¹.
    pub fn b_m1(&self) -> f64 {
        self.b_cm1 * 100.0
    }

    /// Rotational energy quantum hcB̃ (J); E_J = hcB̃·J(J+1).
    pub fn rotational_energy_quantum(&self) -> f64 {
        crate::constants::PLANCK * SPEED_OF_LIGHT * self.b_m1()
    }

    /// Moment of inertia I = ħ/(4πB̃c) (kg·m²).
    pub fn moment_of_inertia(&self) -> f64 {
        HBAR / (4.0 * std::f64::consts::PI * self.b_m1() * SPEED_OF_LIGHT)
    }

    /// Molecular mass (kg).
    pub fn mass_kg(&self) -> f64 {
        self.mass_amu * ATOMIC_MASS
    }
}

/// Moment of inertia from the rotational constant, I = ħ/(4πB̃c).
pub fn derive_moment_of_inertia(species: &MolecularSpecies) -> Result<f64> {
    if !(species.b_cm1 > 0.0) {
        return Err(Error::InvalidSpecies(format!(
            "{}: rotational constant must be positive",
            species.name
        )));
    }
    Ok(species.moment_of_inertia())
}

/// Shipped species records. Format: one record per line,
/// `name,alpha_par_A3,alpha_perp_A3,B_cm1,mass_amu,j_parity`,
/// `#` comments and blank lines ignored.
pub const BUILTIN_SPECIES_DATA: &str = include_str!("../data/species.csv");

/// Parses a species data file.
pub fn parse_species_file(text: &str) -> Result<Vec<MolecularSpecies>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(|f| f.trim()).collect();
        if fields.len() != 6 {
            return Err(Error::InvalidSpecies(format!(
                "line {}: expected 6 comma-separated fields, got {}",
                lineno + 1,
                fields.len()
            )));
        }
        // Header row is permitted.
        if fields[0] == "name" {
            continue;
        }
        let num = |i: usize, what: &str| -> Result<f64> {
            fields[i].parse::<f64>().map_err(|_| {
                Error::InvalidSpecies(format!(
                    "line {}: cannot parse {what} '{}'",
                    lineno + 1,
                    fields[i]
                ))
            })
        };
        out.push(MolecularSpecies::new(
            fields[0],
            num(1, "alpha_par_A3")?,
            num(2, "alpha_perp_A3")?,
            num(3, "B_cm1")?,
            num(4, "mass_amu")?,
            JParity::parse(fields[5])?,
        )?);
    }
    Ok(out)
}

/// The built-in species table (contains CS₂).
pub fn builtin_species() -> Vec<MolecularSpecies> {
    parse_species_file(BUILTIN_SPECIES_DATA).expect("builtin species data is valid")
}

/// Looks up a species by (case-insensitive) name in a table.
pub fn find_species<'a>(table: &'a [MolecularSpecies], name: &str) -> Result<&'a MolecularSpecies> {
    table
        .iter()
        .find(|s| s.name.eq_ignore_ascii_case(name))
        .ok_or_else(|| Error::InvalidSpecies(format!("no species named '{name}'")))
}

/// CS₂ with the shipped literature constants.
pub fn cs2() -> MolecularSpecies {
    find_species(&builtin_species(), "CS2")
        .expect("CS2 is shipped")
        .clone()
}
