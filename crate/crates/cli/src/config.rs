//! Scenario configuration: a TOML-style `[section] key = value` file with
//! every field overridable from the command line.

use moldeflect::classical::EnsembleSpec;
use moldeflect::deflection::{DeflectingBeam, DeflectionMode, ScatteringGeometry};
use moldeflect::species::{builtin_species, find_species, parse_species_file, MolecularSpecies};
use moldeflect::{KickAxis, KickPulse, RngSpec, ThermalSpec};

use crate::CommonArgs;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// A fully resolved scenario.
pub struct Scenario {
    pub species: MolecularSpecies,
    pub thermal: ThermalSpec,
    pub pulse: Option<KickPulse>,
    pub beam: Option<DeflectingBeam>,
    pub geometry: Option<ScatteringGeometry>,
    pub mode: DeflectionMode,
    pub samples: usize,
    pub seed: u64,
    pub bins: usize,
    pub out_dir: std::path::PathBuf,
    /// Echo of every resolved setting for the manifest.
    pub echo: serde_json::Value,
}

impl Scenario {
    pub fn ensemble(&self) -> Result<EnsembleSpec, ConfigError> {
        EnsembleSpec::new(self.samples, self.thermal, RngSpec::new(self.seed))
            .map_err(|e| bad(e.to_string()))
    }
}

fn get_f64(table: &toml::Table, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
    match table.get(section).and_then(|s| s.get(key)) {
        None => Ok(None),
        Some(v) => v
            .as_float()
            .or_else(|| v.as_integer().map(|i| i as f64))
            .map(Some)
            .ok_or_else(|| bad(format!("[{section}] {key} must be a number"))),
    }
}

fn get_str<'t>(
    table: &'t toml::Table,
    section: &str,
    key: &str,
) -> Result<Option<&'t str>, ConfigError> {
    match table.get(section).and_then(|s| s.get(key)) {
        None => Ok(None),
        Some(v) => v
            .as_str()
            .map(Some)
            .ok_or_else(|| bad(format!("[{section}] {key} must be a string"))),
    }
}

/// Loads the config file (if any), applies CLI overrides, validates
/// everything, and resolves the species reference.
pub fn resolve(args: &CommonArgs) -> Result<Scenario, ConfigError> {
    resolve_with(args, true)
}

/// As [`resolve`], optionally tolerating a missing thermal spec (used by
/// commands that carry their own J_T lists).
pub fn resolve_with(args: &CommonArgs, thermal_required: bool) -> Result<Scenario, ConfigError> {
    let table: toml::Table = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
            text.parse()
                .map_err(|e| bad(format!("cannot parse {}: {e}", path.display())))?
        }
        None => toml::Table::new(),
    };

    // species table: built-in plus an optional file
    let mut species_table = builtin_species();
    if let Some(path) = &args.species_file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| bad(format!("cannot read {}: {e}", path.display())))?;
        let extra = parse_species_file(&text).map_err(|e| bad(e.to_string()))?;
        species_table.extend(extra);
    }
    let species_name = args
        .species
        .clone()
        .or_else(|| {
            get_str(&table, "species", "name")
                .ok()
                .flatten()
                .map(String::from)
        })
        .unwrap_or_else(|| "CS2".to_string());
    let species = find_species(&species_table, &species_name)
        .map_err(|e| bad(e.to_string()))?
        .clone();
    species.validate().map_err(|e| bad(e.to_string()))?;

    // thermal: exactly one of J_T / temperature
    let jt = args.jt.or(get_f64(&table, "thermal", "jt")?);
    let temp = args.temp.or(get_f64(&table, "thermal", "temp_k")?);
    let thermal = match (jt, temp) {
        (Some(_), Some(_)) => {
            return Err(bad("give either --jt or --temp, not both"));
        }
        (Some(j), None) => ThermalSpec::from_j_thermal(j).map_err(|e| bad(e.to_string()))?,
        (None, Some(t)) => ThermalSpec::from_temperature(t).map_err(|e| bad(e.to_string()))?,
        (None, None) if !thermal_required => {
            ThermalSpec::from_j_thermal(1.0).expect("placeholder thermal spec")
        }
        (None, None) => return Err(bad("missing thermal spec: --jt X or --temp K")),
    };

    // optional prealignment kick
    let kick_p = args.kick.or(get_f64(&table, "kick", "p")?);
    let kick_axis = match args
        .kick_axis
        .as_deref()
        .or(get_str(&table, "kick", "axis")?)
    {
        Some(s) => KickAxis::parse(s).map_err(|e| bad(e.to_string()))?,
        None => KickAxis::ZParallel,
    };
    let pulse = match kick_p {
        Some(p) => {
            let pulse = KickPulse::from_strength(p, kick_axis).map_err(|e| bad(e.to_string()))?;
            Some(pulse)
        }
        None => {
            let intensity = get_f64(&table, "kick", "intensity_w_cm2")?;
            let fwhm_ps = get_f64(&table, "kick", "fwhm_ps")?;
            match (intensity, fwhm_ps) {
                (Some(i), Some(f)) => Some(
                    KickPulse::from_pulse(i, f * 1e-12, kick_axis)
                        .map_err(|e| bad(e.to_string()))?,
                ),
                (None, None) => None,
                _ => return Err(bad("[kick] needs both intensity_w_cm2 and fwhm_ps")),
            }
        }
    };
    if let Some(p) = &pulse {
        if p.kick_strength(&species) < 0.0 {
            eprintln!("warning: negative kick strength (Δα < 0); the pulse anti-aligns");
        }
    }

    // deflecting beam + geometry (required only by strong-deflect)
    let intensity = args
        .intensity
        .or(get_f64(&table, "beam", "intensity_w_cm2")?);
    let waist_um = args.waist.or(get_f64(&table, "beam", "waist_um")?);
    let tau_ns = args.tau.or(get_f64(&table, "beam", "tau_ns")?);
    let beam = match (intensity, waist_um, tau_ns) {
        (Some(i), Some(w), Some(t)) => {
            Some(DeflectingBeam::new(i, w * 1e-6, t * 1e-9).map_err(|e| bad(e.to_string()))?)
        }
        (None, None, None) => None,
        _ => return Err(bad(
            "[beam] needs all of intensity_w_cm2 (--intensity), waist_um (--waist), tau_ns (--tau)",
        )),
    };
    let vx = args.vx.or(get_f64(&table, "geometry", "vx_m_s")?);
    let impact_um = args.impact.or(get_f64(&table, "geometry", "impact_um")?);
    let geometry = match (vx, impact_um) {
        (Some(v), Some(z)) => {
            Some(ScatteringGeometry::new(v, z * 1e-6).map_err(|e| bad(e.to_string()))?)
        }
        (None, None) => None,
        _ => {
            return Err(bad(
                "[geometry] needs both vx_m_s (--vx) and impact_um (--impact)",
            ))
        }
    };

    let mode = match args.mode.as_deref().or(get_str(&table, "deflect", "mode")?) {
        Some(s) => DeflectionMode::parse(s).map_err(|e| bad(e.to_string()))?,
        None => DeflectionMode::Weak,
    };

    let samples = args
        .samples
        .or(get_f64(&table, "ensemble", "samples")?.map(|v| v as usize))
        .unwrap_or(1_000_000);
    if samples == 0 {
        return Err(bad("[ensemble] samples must be ≥ 1"));
    }
    let seed = args
        .seed
        .or(get_f64(&table, "ensemble", "seed")?.map(|v| v as u64))
        .unwrap_or(1);
    let bins = args
        .bins
        .or(get_f64(&table, "output", "bins")?.map(|v| v as usize))
        .unwrap_or(200);
    if bins < 2 {
        return Err(bad("[output] bins must be ≥ 2"));
    }
    let out_dir = args
        .out
        .clone()
        .or_else(|| {
            get_str(&table, "output", "dir")
                .ok()
                .flatten()
                .map(std::path::PathBuf::from)
        })
        .unwrap_or_else(|| std::path::PathBuf::from("out"));

    let echo = serde_json::json!({
        "species": {
            "name": species.name,
            "alpha_par_A3": species.alpha_parallel_a3,
            "alpha_perp_A3": species.alpha_perp_a3,
            "B_cm1": species.b_cm1,
            "mass_amu": species.mass_amu,
            "j_parity": species.j_parity.as_str(),
        },
        "thermal": {
            "temp_k": thermal.temperature_k(&species),
            "jt": thermal.j_thermal(&species),
        },
        "kick": pulse.map(|p| serde_json::json!({
            "p": p.kick_strength(&species),
            "axis": match p.polarization { KickAxis::ZParallel => "z", KickAxis::XPerpendicular => "x" },
        })),
        "beam": beam.map(|b| serde_json::json!({
            "intensity_w_cm2": b.peak_intensity_w_cm2,
            "waist_um": b.waist_m * 1e6,
            "tau_ns": b.fwhm_s * 1e9,
        })),
        "geometry": geometry.map(|g| serde_json::json!({
            "vx_m_s": g.v_x_m_s,
            "impact_um": g.impact_z_m * 1e6,
        })),
        "mode": match mode { DeflectionMode::Weak => "weak", DeflectionMode::Strong => "strong" },
        "samples": samples,
        "seed": seed,
        "bins": bins,
    });

    Ok(Scenario {
        species,
        thermal,
        pulse,
        beam,
        geometry,
        mode,
        samples,
        seed,
        bins,
        out_dir,
        echo,
    })
}
