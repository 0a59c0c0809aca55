//! Optical deflection observables: the isotropic-ensemble angle γ₀, the
//! weak-field affine law γ(A), and strong-field trajectories where the
//! molecule's ⟨cos²θ⟩ is re-solved adiabatically along the beam envelope.

use rayon::prelude::*;

use crate::classical::{apply_kick, sample_thermal_state, time_averaged_alignment, EnsembleSpec};
use crate::constants::field_squared_from_intensity;
use crate::error::{Error, Result};
use crate::histogram::{pearson_correlation, Histogram, SampleSummary};
use crate::pulse::KickPulse;
use crate::species::MolecularSpecies;
use crate::strongfield::{
    current_alignment_and_period, solve_energy_at_squared_field, AdiabaticRecord, Regime,
};

/// Gaussian deflecting beam, polarized along z:
/// E = E₀·exp[−(x²+z²)/w₀²]·exp[−2ln2·t²/τ²].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeflectingBeam {
    pub peak_intensity_w_cm2: f64,
    /// Waist w₀ of the field profile (m).
    pub waist_m: f64,
    /// Intensity FWHM τ of the temporal envelope (s).
    pub fwhm_s: f64,
}

impl DeflectingBeam {
    pub fn new(peak_intensity_w_cm2: f64, waist_m: f64, fwhm_s: f64) -> Result<Self> {
        if !(peak_intensity_w_cm2 >= 0.0) || !(waist_m > 0.0) || !(fwhm_s > 0.0) {
            return Err(Error::InvalidSpec(
                "beam needs intensity ≥ 0, waist > 0, FWHM > 0".into(),
            ));
        }
        Ok(Self {
            peak_intensity_w_cm2,
            waist_m,
            fwhm_s,
        })
    }

    /// E₀² at the focus (V²/m²).
    pub fn peak_field_squared(&self) -> f64 {
        field_squared_from_intensity(self.peak_intensity_w_cm2)
    }
}

/// Projectile geometry: speed along x and the fixed impact parameter z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatteringGeometry {
    pub v_x_m_s: f64,
    pub impact_z_m: f64,
}

impl ScatteringGeometry {
    pub fn new(v_x_m_s: f64, impact_z_m: f64) -> Result<Self> {
        if !(v_x_m_s > 0.0) {
            return Err(Error::InvalidSpec("v_x must be positive".into()));
        }
        Ok(Self {
            v_x_m_s,
            impact_z_m,
        })
    }
}

/// Mean deflection angle of an isotropic ensemble:
/// γ₀ = [ᾱE₀²/(4Mv_x²)]·(−4z/w₀)·√(π/2)·(1 + 2w₀²ln2/(τ²v_x²))^{−1/2}
///      ·exp(−2z²/w₀²).
pub fn gamma0(species: &MolecularSpecies, beam: &DeflectingBeam, geom: &ScatteringGeometry) -> f64 {
    let e0sq = beam.peak_field_squared();
    let m = species.mass_kg();
    let vx2 = geom.v_x_m_s * geom.v_x_m_s;
    let z = geom.impact_z_m;
    let w0 = beam.waist_m;
    let transit = 1.0 + 2.0 * w0 * w0 * 2f64.ln() / (beam.fwhm_s * beam.fwhm_s * vx2);
    species.alpha_mean_si() * e0sq / (4.0 * m * vx2)
        * (-4.0 * z / w0)
        * (std::f64::consts::PI / 2.0).sqrt()
        * transit.powf(-0.5)
        * (-2.0 * z * z / (w0 * w0)).exp()
}

/// Weak-field deflection angle of a rotor with time-averaged alignment A:
/// γ = γ₀·[α∥·A + α⊥·(1 − A)]/ᾱ.
pub fn deflect_weak(
    a: f64,
    species: &MolecularSpecies,
    beam: &DeflectingBeam,
    geom: &ScatteringGeometry,
) -> f64 {
    gamma0(species, beam, geom)
        * (species.alpha_parallel_a3 * a + species.alpha_perp_a3 * (1.0 - a))
        / species.alpha_mean_a3()
}

/// Relative E² change per grid step along the trajectory.
const FIELD_GRID_REL_STEP: f64 = 0.005;
/// The force integral is truncated where E² falls below this fraction of
/// its on-trajectory peak; the neglected tail is bounded by the same
/// fraction of the total.
const FIELD_GRID_CUTOFF: f64 = 1e-6;
/// A sample is flagged non-adiabatic when its orbit period times the
/// envelope rate |d lnE²/dt| exceeds this anywhere on the trajectory.
const ADIABATICITY_LIMIT: f64 = 0.1;

/// Outcome of one strong-field trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryResult {
    pub v_z_m_s: f64,
    pub gamma: f64,
    pub separatrix_crossed: bool,
    pub pendular_at_peak: bool,
    /// The envelope changed too fast for this molecule's rotation somewhere
    /// along the trajectory; its v_z rests on a strained approximation.
    pub non_adiabatic: bool,
}

/// Integrates v_z = −(1/M)∫(∂U/∂z)dt for one rotor crossing the beam, with
/// ⟨cos²θ⟩(t) re-solved from the adiabatic invariant on a grid where E²
/// changes by at most 0.5% per step.
///
/// The molecule sees E²(t) = E_z²·exp(−2κt²) with κ = v_x²/w₀² + 2ln2/τ²,
/// so ∂U/∂z reduces to (z/w₀²)·E²·[Δα⟨u⟩ + α⊥]; the time integral runs
/// symmetrically over both envelope halves.
pub fn deflect_strong_trajectory(
    record: &mut AdiabaticRecord,
    species: &MolecularSpecies,
    beam: &DeflectingBeam,
    geom: &ScatteringGeometry,
) -> Result<TrajectoryResult> {
    let w0 = beam.waist_m;
    let z = geom.impact_z_m;
    let kappa =
        geom.v_x_m_s * geom.v_x_m_s / (w0 * w0) + 2.0 * 2f64.ln() / (beam.fwhm_s * beam.fwhm_s);
    let ez_sq = beam.peak_field_squared() * (-2.0 * z * z / (w0 * w0)).exp();

    if ez_sq == 0.0 {
        return Ok(TrajectoryResult {
            v_z_m_s: 0.0,
            gamma: 0.0,
            separatrix_crossed: false,
            pendular_at_peak: false,
            non_adiabatic: false,
        });
    }

    let n = (FIELD_GRID_CUTOFF.recip().ln() / FIELD_GRID_REL_STEP).ceil() as usize;
    let delta = FIELD_GRID_CUTOFF.recip().ln() / n as f64;

    // ramp up: from the 1e−6 fringe (k = n) to the trajectory peak (k = 0)
    let mut u_of_k = vec![0.0f64; n + 1];
    let mut non_adiabatic = false;
    for k in (0..=n).rev() {
        let e2 = ez_sq * (-(k as f64) * delta).exp();
        solve_energy_at_squared_field(record, species, e2)?;
        let (u, period) = current_alignment_and_period(record, species, e2)?;
        u_of_k[k] = u;
        // |d lnE²/dt| = 4κ|t| on the Gaussian envelope
        let t_k = ((k as f64) * delta / (2.0 * kappa)).sqrt();
        if period * 4.0 * kappa * t_k > ADIABATICITY_LIMIT {
            non_adiabatic = true;
        }
    }
    let pendular_at_peak = record.regime == Regime::Pendular;

    let d_alpha = species.alpha_aniso_si();
    let a_perp = species.alpha_perp_si();
    let t_of_k = |k: usize| ((k as f64) * delta / (2.0 * kappa)).sqrt();
    let f_of_k = |k: usize| ez_sq * (-(k as f64) * delta).exp() * (d_alpha * u_of_k[k] + a_perp);

    let mut integral = 0.0;
    for k in 0..n {
        integral += 0.5 * (f_of_k(k) + f_of_k(k + 1)) * (t_of_k(k + 1) - t_of_k(k));
    }
    // both halves of the symmetric envelope
    integral *= 2.0;

    let v_z = -(z / (species.mass_kg() * w0 * w0)) * integral;
    Ok(TrajectoryResult {
        v_z_m_s: v_z,
        gamma: v_z / geom.v_x_m_s,
        separatrix_crossed: record.separatrix_crossed,
        pendular_at_peak,
        non_adiabatic,
    })
}

/// Which deflection law a run uses; the regimes are never switched
/// automatically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeflectionMode {
    Weak,
    Strong,
}

impl DeflectionMode {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "weak" => Ok(DeflectionMode::Weak),
            "strong" => Ok(DeflectionMode::Strong),
            other => Err(Error::InvalidSpec(format!(
                "unknown mode '{other}' (expected weak|strong)"
            ))),
        }
    }
}

/// Per-sample failure counters of a deflection run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DeflectionFlags {
    pub rejected_degenerate: usize,
    pub separatrix_crossed: usize,
    pub pendular_at_peak: usize,
    /// Samples whose rotation was too slow for the envelope somewhere on
    /// the trajectory.
    pub non_adiabatic: usize,
    pub failed: usize,
    /// Samples with |γ| > 0.1, outside the perturbative regime.
    pub nonperturbative: usize,
}

/// Ensemble deflection observables. Distributions cover every molecule
/// that reached the detector; samples whose trajectory crossed the
/// separatrix or strained the adiabatic approximation carry a flag so they
/// can be reported separately (their v_z rests on the half-area capture
/// rule or on an envelope too fast for their rotation).
#[derive(Debug, Clone, PartialEq)]
pub struct DeflectionResult {
    pub v_z: Vec<f64>,
    pub gamma: Vec<f64>,
    /// Free-rotor time-averaged alignment of the same molecules (after the
    /// kick, before the beam).
    pub alignment: Vec<f64>,
    /// Per-sample flag (separatrix crossing or non-adiabatic stretch),
    /// aligned with the sample vectors.
    pub flagged: Vec<bool>,
    pub flags: DeflectionFlags,
}

impl DeflectionResult {
    pub fn histogram_v_z(&self, bins: usize) -> Result<Histogram> {
        let (lo, hi) = span(&self.v_z);
        Histogram::from_samples(lo, hi, bins, &self.v_z)
    }

    pub fn histogram_gamma(&self, bins: usize) -> Result<Histogram> {
        let (lo, hi) = span(&self.gamma);
        Histogram::from_samples(lo, hi, bins, &self.gamma)
    }

    pub fn summary_v_z(&self) -> SampleSummary {
        SampleSummary::from_samples(&self.v_z)
    }

    pub fn summary_gamma(&self) -> SampleSummary {
        SampleSummary::from_samples(&self.gamma)
    }

    /// Pearson correlation between per-molecule v_z and the free alignment
    /// factor A, over the unflagged samples (the ones the adiabatic
    /// treatment cleanly describes).
    pub fn correlation_v_z_alignment(&self) -> f64 {
        let v: Vec<f64> = self
            .v_z
            .iter()
            .zip(&self.flagged)
            .filter(|(_, &c)| !c)
            .map(|(x, _)| *x)
            .collect();
        let a: Vec<f64> = self
            .alignment
            .iter()
            .zip(&self.flagged)
            .filter(|(_, &c)| !c)
            .map(|(x, _)| *x)
            .collect();
        pearson_correlation(&v, &a)
    }

    /// Fraction of samples carrying a flag.
    pub fn flagged_fraction(&self) -> f64 {
        if self.flagged.is_empty() {
            0.0
        } else {
            self.flagged.iter().filter(|&&c| c).count() as f64 / self.flagged.len() as f64
        }
    }
}

fn span(samples: &[f64]) -> (f64, f64) {
    let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo < hi {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    }
}

/// Runs the full ensemble: thermal sampling, optional prealignment kick,
/// then either the affine weak-field law or per-molecule strong-field
/// trajectories.
pub fn deflection_distribution(
    species: &MolecularSpecies,
    spec: &EnsembleSpec,
    pulse: Option<&KickPulse>,
    beam: &DeflectingBeam,
    geom: &ScatteringGeometry,
    mode: DeflectionMode,
) -> DeflectionResult {
    let kick = pulse.map(|k| {
        (
            k.reduced_kick_strength(species, &spec.thermal),
            k.polarization,
        )
    });

    enum Outcome {
        Ok {
            v_z: f64,
            gamma: f64,
            a: f64,
            separatrix: bool,
            pendular: bool,
            non_adiabatic: bool,
        },
        Degenerate,
        Failed,
    }

    let raw: Vec<Outcome> = (0..spec.n_samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut st = sample_thermal_state(&spec.rng, i);
            if let Some((p_s, axis)) = kick {
                st = apply_kick(&st, p_s, axis);
            }
            let a = match time_averaged_alignment(&st) {
                Ok(a) => a,
                Err(_) => return Outcome::Degenerate,
            };
            match mode {
                DeflectionMode::Weak => {
                    let gamma = deflect_weak(a, species, beam, geom);
                    Outcome::Ok {
                        v_z: gamma * geom.v_x_m_s,
                        gamma,
                        a,
                        separatrix: false,
                        pendular: false,
                        non_adiabatic: false,
                    }
                }
                DeflectionMode::Strong => {
                    let mut record =
                        match AdiabaticRecord::from_reduced_state(species, &spec.thermal, &st) {
                            Ok(r) => r,
                            Err(_) => return Outcome::Failed,
                        };
                    match deflect_strong_trajectory(&mut record, species, beam, geom) {
                        Ok(tr) => Outcome::Ok {
                            v_z: tr.v_z_m_s,
                            gamma: tr.gamma,
                            a,
                            separatrix: tr.separatrix_crossed,
                            pendular: tr.pendular_at_peak,
                            non_adiabatic: tr.non_adiabatic,
                        },
                        Err(_) => Outcome::Failed,
                    }
                }
            }
        })
        .collect();

    let mut out = DeflectionResult {
        v_z: Vec::with_capacity(spec.n_samples),
        gamma: Vec::with_capacity(spec.n_samples),
        alignment: Vec::with_capacity(spec.n_samples),
        flagged: Vec::with_capacity(spec.n_samples),
        flags: DeflectionFlags::default(),
    };
    for o in raw {
        match o {
            Outcome::Ok {
                v_z,
                gamma,
                a,
                separatrix,
                pendular,
                non_adiabatic,
            } => {
                out.v_z.push(v_z);
                out.gamma.push(gamma);
                out.alignment.push(a);
                out.flagged.push(separatrix || non_adiabatic);
                if separatrix {
                    out.flags.separatrix_crossed += 1;
                }
                if non_adiabatic {
                    out.flags.non_adiabatic += 1;
                }
                if pendular {
                    out.flags.pendular_at_peak += 1;
                }
                if gamma.abs() > 0.1 {
                    out.flags.nonperturbative += 1;
                }
            }
            Outcome::Degenerate => out.flags.rejected_degenerate += 1,
            Outcome::Failed => out.flags.failed += 1,
        }
    }
    out
}
